use std::fmt::Write;

use serde_json::{json, Value};

use crate::dp::{BellmanReport, ControlledProblem, LocalValues, ProblemMode, RelationClass, UpperImageReport, ValueSet};
use crate::error::Result;
use crate::rectangular::{is_m_rectangular, RectReport};
use crate::scalar::{format_scalar, format_set, VecD};
use crate::stochastic::{cond_expect, vsup_adapted, AdaptedVector};
use crate::vsup::{Certificate, SupResult, SupStatus};

const DECIMALS: usize = 4;
/// Dynamics problems with more root strategies than this get no per-strategy tables.
const MAX_TABLE_STRATEGIES: usize = 8;

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn table(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| rows.iter().filter_map(|r| r.get(c)).map(|s| s.chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for r in rows {
        let mut line = String::from("  ");
        for (c, cell) in r.iter().enumerate() {
            line.push_str(cell);
            if c + 1 < r.len() {
                line.push_str(&" ".repeat(widths[c] - cell.chars().count() + 2));
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

fn row(label: &str, x: &AdaptedVector) -> Vec<String> {
    let mut r = vec![label.to_string()];
    r.extend(x.values.iter().map(ToString::to_string));
    r.push("|".into());
    r.extend(x.values.iter().map(|v| v.to_decimal_string(DECIMALS)));
    r
}

fn local_name(problem: &ControlledProblem, l: &LocalValues) -> String {
    let n = problem.tree.name(l.node);
    if l.state.0.is_empty() {
        n.to_string()
    } else {
        format!("{n}|{}", l.state.0)
    }
}

/// One line per local set, e.g. `V0(Theta) = {(5,4), (9/2,5)}` or `V1(Theta)[u|phi] = {(6,4)}`.
pub fn value_set_lines(problem: &ControlledProblem, symbol: &str, sets: &[ValueSet]) -> String {
    let mut out = String::new();
    set_lines(&mut out, problem, symbol, sets);
    out
}

fn set_lines(out: &mut String, problem: &ControlledProblem, symbol: &str, sets: &[ValueSet]) {
    for vs in sets {
        for l in &vs.locals {
            if vs.time == 0 {
                let _ = writeln!(out, "{symbol}0({}) = {}", problem.family_label, format_set(&l.elements));
            } else {
                let _ = writeln!(
                    out,
                    "{symbol}{}({})[{}] = {}",
                    vs.time,
                    problem.family_label,
                    local_name(problem, l),
                    format_set(&l.elements)
                );
            }
        }
    }
}

/// Per-strategy tables of model-wise conditional expectations with their suprema.
pub fn expectation_tables(problem: &ControlledProblem) -> Result<String> {
    let tree = &problem.tree;
    let root = tree.root();
    let strategies = problem.enumerate_strategies(0, root, &problem.system().initial_state())?;
    let mut out = String::new();
    if matches!(problem.mode, ProblemMode::Dynamics(_)) && strategies.len() > MAX_TABLE_STRATEGIES {
        let _ = writeln!(out, "({} strategies, tables omitted)", strategies.len());
        return Ok(out);
    }
    for s in &strategies {
        let x = problem.terminal_loss(s)?;
        let _ = writeln!(out, "strategy {}", s.name);
        let mut nested = x.clone();
        for t in (0..tree.horizon()).rev() {
            let mut header = vec![format!("E_{t}")];
            header.extend(tree.level(t).iter().map(|&n| tree.name(n).to_string()));
            let mut rows = vec![header];
            let mut exps = Vec::new();
            for m in problem.models() {
                let e = cond_expect(tree, m, &x, t)?;
                rows.push(row(&m.id, &e));
                exps.push(e);
            }
            if let Some(v) = vsup_adapted(problem.sup.as_ref(), &problem.cone, tree, &exps)?.value() {
                rows.push(row("vsup", v));
            } else {
                rows.push(vec!["vsup".into(), "does not exist".into()]);
            }
            let inner = problem
                .models()
                .iter()
                .map(|m| cond_expect(tree, m, &nested, t))
                .collect::<Result<Vec<_>>>()?;
            let next = vsup_adapted(problem.sup.as_ref(), &problem.cone, tree, &inner)?.value().cloned();
            match next {
                Some(v) => {
                    if t + 1 < tree.horizon() {
                        rows.push(row("nested", &v));
                    }
                    nested = v;
                }
                None => {
                    rows.push(vec!["nested".into(), "does not exist".into()]);
                    out.push_str(&table(&rows));
                    break;
                }
            }
            out.push_str(&table(&rows));
        }
        out.push('\n');
    }
    Ok(out)
}

/// The full text report: expectation tables, value sets and Bellman verdicts.
pub fn emit_tables(problem: &ControlledProblem, report: &BellmanReport) -> Result<String> {
    let mut out = String::new();
    if !problem.name.is_empty() {
        let _ = writeln!(out, "instance: {}", problem.name);
    }
    let _ = writeln!(
        out,
        "family: {} ({} models, m-rectangular: {})",
        problem.family_label,
        problem.family.len(),
        yes_no(report.m_rectangular)
    );
    let _ = writeln!(out, "cone: {} (d = {})", cone_name(problem), problem.dim());
    out.push('\n');
    out.push_str(&expectation_tables(problem)?);
    set_lines(&mut out, problem, "V", &report.v);
    set_lines(&mut out, problem, "R", &report.r);
    set_lines(&mut out, problem, "B", &report.b);
    if report.non_unique {
        out.push_str("note: some suprema are not unique; canonical witnesses are shown\n");
    }
    out.push('\n');
    out.push_str(&bellman_text(problem, report));
    Ok(out)
}

fn cone_name(problem: &ControlledProblem) -> &'static str {
    use crate::cone::ConeKind::*;
    match problem.cone.kind() {
        ComponentWise => "componentwise",
        Halfspace(_) => "halfspace",
        PolyhedralDual | PolyhedralGenerators => "polyhedral",
    }
}

pub fn bellman_text(problem: &ControlledProblem, report: &BellmanReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "Bellman relations ({})", problem.family_label);
    let mut rows = Vec::new();
    for c in &report.checks {
        let mut r = vec![
            format!("t={}", c.time),
            c.relation.class().to_string(),
            c.relation.label().to_string(),
            if c.holds { "pass".into() } else { "FAIL".into() },
        ];
        if let Some(w) = &c.witness {
            r.push(format!("witness {w}"));
        }
        rows.push(r);
    }
    out.push_str(&table(&rows));
    for class in [RelationClass::Weak, RelationClass::Strong, RelationClass::Equality] {
        let _ = writeln!(out, "{class}: {}", report.verdict(class));
    }
    if report.strictly_weak() {
        out.push_str("only the weak Bellman principle holds\n");
    }
    out
}

fn vec_json(v: &VecD) -> Value {
    Value::Array(v.components().iter().map(|x| json!(format_scalar(x))).collect())
}

fn sets_json(problem: &ControlledProblem, sets: &[ValueSet]) -> Value {
    Value::Array(
        sets.iter()
            .map(|vs| {
                let entries: Vec<Value> = vs
                    .locals
                    .iter()
                    .map(|l| {
                        json!({
                            "node": problem.tree.name(l.node),
                            "state": l.state.0,
                            "elements": l.elements.iter().map(vec_json).collect::<Vec<_>>(),
                            "provenance": l.provenance.iter().map(ToString::to_string).collect::<Vec<_>>(),
                        })
                    })
                    .collect();
                json!({ "time": vs.time, "entries": entries })
            })
            .collect(),
    )
}

pub fn bellman_json(problem: &ControlledProblem, report: &BellmanReport) -> Value {
    let checks: Vec<Value> = report
        .checks
        .iter()
        .map(|c| {
            json!({
                "time": c.time,
                "class": c.relation.class().to_string(),
                "relation": c.relation.label(),
                "holds": c.holds,
                "witness": c.witness.as_ref().map(|w| json!({
                    "node": w.node,
                    "state": w.state,
                    "element": vec_json(&w.element),
                })),
            })
        })
        .collect();
    json!({
        "instance": problem.name,
        "family": problem.family_label,
        "models": problem.family.len(),
        "m_rectangular": report.m_rectangular,
        "componentwise": report.componentwise,
        "pointed": report.pointed,
        "non_unique": report.non_unique,
        "V": sets_json(problem, &report.v),
        "R": sets_json(problem, &report.r),
        "B": sets_json(problem, &report.b),
        "checks": checks,
        "weak": report.holds(RelationClass::Weak),
        "strong": report.holds(RelationClass::Strong),
        "equality": report.holds(RelationClass::Equality),
    })
}

pub fn sup_json(r: &SupResult) -> Value {
    let (status, value) = match &r.status {
        SupStatus::Unique(v) => ("unique", Some(vec_json(v))),
        SupStatus::NonUniqueWitness(v) => ("non-unique", Some(vec_json(v))),
        SupStatus::NotExists => ("not-exists", None),
    };
    let certificate = match &r.certificate {
        None => Value::Null,
        Some(Certificate::SecondSupremum(w)) => json!({ "second_supremum": vec_json(w) }),
        Some(Certificate::EmptyIntersection) => json!({ "empty_intersection": true }),
        Some(Certificate::Undominated {
            candidate,
            point,
            vertices,
        }) => json!({
            "candidate": vec_json(candidate),
            "undominated": vec_json(point),
            "vertices": vertices.iter().map(vec_json).collect::<Vec<_>>(),
        }),
    };
    json!({ "status": status, "supremum": value, "certificate": certificate })
}

pub fn rect_text(problem: &ControlledProblem, report: &RectReport) -> String {
    let mut out = String::new();
    let m_rect = is_m_rectangular(&problem.tree, &problem.family);
    let _ = writeln!(
        out,
        "family: {} ({} models, m-rectangular: {})",
        problem.family_label,
        problem.family.len(),
        yes_no(m_rect)
    );
    if let Some(seed) = report.seed {
        let _ = writeln!(out, "seed: {seed}");
    }
    for e in &report.entries {
        if e.forward == Some(false) {
            let nested = e.nested.as_ref().map_or("-".into(), ToString::to_string);
            let direct = e.direct.as_ref().map_or("-".into(), ToString::to_string);
            let _ = writeln!(
                out,
                "counterexample: vector {} at t={}: nested {nested} not below direct {direct}",
                e.vector, e.time
            );
        }
    }
    if report.missing_suprema() > 0 {
        let _ = writeln!(out, "suprema missing in {} checks", report.missing_suprema());
    }
    if report.reverse_failures() > 0 {
        let _ = writeln!(out, "reverse inequality failed in {} checks", report.reverse_failures());
    }
    let _ = writeln!(out, "{}", report.summary());
    out
}

pub fn rect_json(problem: &ControlledProblem, report: &RectReport) -> Value {
    let adapted = |x: &Option<AdaptedVector>| {
        x.as_ref()
            .map(|v| Value::Array(v.values.iter().map(vec_json).collect()))
            .unwrap_or(Value::Null)
    };
    json!({
        "family": problem.family_label,
        "m_rectangular": is_m_rectangular(&problem.tree, &problem.family),
        "seed": report.seed,
        "vectors_checked": report.vectors_checked,
        "forward_counterexamples": report.forward_counterexamples(),
        "reverse_failures": report.reverse_failures(),
        "missing_suprema": report.missing_suprema(),
        "entries": report.entries.iter().map(|e| json!({
            "vector": e.vector,
            "time": e.time,
            "nested": adapted(&e.nested),
            "direct": adapted(&e.direct),
            "forward": e.forward,
            "reverse": e.reverse,
            "equal": e.equal,
        })).collect::<Vec<_>>(),
        "summary": report.summary(),
    })
}

pub fn pareto_text(problem: &ControlledProblem, report: &UpperImageReport, time: Option<usize>) -> String {
    let mut out = String::new();
    let sets: Vec<ValueSet> = report
        .generators
        .iter()
        .filter(|g| time.is_none_or(|t| g.time == t))
        .cloned()
        .collect();
    set_lines(&mut out, problem, "P", &sets);
    let _ = writeln!(
        out,
        "inclusion: {}",
        if report.inclusion_holds() { "pass" } else { "FAIL" }
    );
    for f in &report.inclusion_failures {
        let _ = writeln!(out, "  t={} node {}: {} not in the upper image", f.time, f.node, f.value);
    }
    match report.reverse_holds() {
        Some(true) => out.push_str("reverse inclusion on generators: pass\n"),
        Some(false) => {
            out.push_str("reverse inclusion on generators: FAIL\n");
            for f in &report.reverse_failures {
                let _ = writeln!(out, "  t={} node {}: generator {} not reached", f.time, f.node, f.value);
            }
        }
        None => out.push_str("reverse inclusion on generators: not checked (family not m-rectangular)\n"),
    }
    let _ = writeln!(out, "{}", report.summary());
    out
}

pub fn pareto_json(problem: &ControlledProblem, report: &UpperImageReport, time: Option<usize>) -> Value {
    let sets: Vec<ValueSet> = report
        .generators
        .iter()
        .filter(|g| time.is_none_or(|t| g.time == t))
        .cloned()
        .collect();
    json!({
        "family": problem.family_label,
        "generators": sets_json(problem, &sets),
        "inclusion": report.inclusion_holds(),
        "reverse": report.reverse_holds(),
        "combinations": report.combinations,
    })
}
