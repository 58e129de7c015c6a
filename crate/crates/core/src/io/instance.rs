use std::collections::{BTreeMap, HashMap};

use serde_json::{json, Map, Value};

use crate::cone::{Cone, ConeKind};
use crate::dp::{
    ControlledProblem, Dynamics, EngineOptions, ProblemMode, State, Tabulated, TabulatedStrategy, ANY_LABEL,
    DEFAULT_BUDGET, DEFAULT_FAMILY_LABEL,
};
use crate::error::{Error, Result};
use crate::rectangular::{rectangularize, MarginalSets};
use crate::scalar::{format_scalar, parse_scalar, Scalar, VecD};
use crate::stochastic::{check_probability_vector, AdaptedVector, Model, ModelFamily, NodeId, ScenarioTree};
use crate::vsup::SupRegistry;

pub const FORMAT_VERSION: u64 = 1;

fn invalid(path: &str, message: impl Into<String>) -> Error {
    Error::validation(path, message)
}

fn syntax(text: &str, e: &serde_json::Error) -> Error {
    let mut offset = 0;
    for (i, line) in text.split_inclusive('\n').enumerate() {
        if i + 1 == e.line() {
            offset += line.char_indices().nth(e.column().saturating_sub(1)).map_or(line.len(), |(b, _)| b);
            break;
        }
        offset += line.len();
    }
    let mut message = e.to_string();
    if let Some(cut) = message.find(" at line ") {
        message.truncate(cut);
    }
    Error::Syntax { offset, message }
}

pub fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| syntax(text, &e))
}

fn object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| invalid(path, "expected an object"))
}

fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| invalid(path, "expected an array"))
}

fn string<'a>(v: &'a Value, path: &str) -> Result<&'a str> {
    v.as_str().ok_or_else(|| invalid(path, "expected a string"))
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| invalid(path, format!("missing field `{key}`")))
}

fn uint(v: &Value, path: &str) -> Result<u64> {
    v.as_u64().ok_or_else(|| invalid(path, "expected a non-negative integer"))
}

pub fn scalar(v: &Value, path: &str) -> Result<Scalar> {
    let text = match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        _ => return Err(invalid(path, "expected a number or a \"p/q\" string")),
    };
    parse_scalar(&text).map_err(|m| invalid(path, m))
}

fn scalars(v: &Value, path: &str) -> Result<Vec<Scalar>> {
    array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, x)| scalar(x, &format!("{path}[{i}]")))
        .collect()
}

pub fn vector(v: &Value, d: usize, path: &str) -> Result<VecD> {
    let xs = scalars(v, path)?;
    if xs.len() != d {
        return Err(invalid(path, format!("dimension mismatch: expected {d}, found {}", xs.len())));
    }
    Ok(VecD(xs))
}

fn vectors(v: &Value, d: usize, path: &str) -> Result<Vec<VecD>> {
    array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, x)| vector(x, d, &format!("{path}[{i}]")))
        .collect()
}

fn node(tree: &ScenarioTree, name: &str, path: &str) -> Result<NodeId> {
    tree.lookup(name).ok_or_else(|| invalid(path, format!("unknown node `{name}`")))
}

fn check_keys(obj: &Map<String, Value>, allowed: &[&str], path: &str) -> Result<()> {
    match obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(invalid(path, format!("unknown field `{k}`"))),
        None => Ok(()),
    }
}

fn within(path: &str, e: Error) -> Error {
    match e {
        Error::Validation { .. } | Error::Syntax { .. } => e,
        other => invalid(path, other.to_string()),
    }
}

/// Parses a cone object. `d` is the expected dimension, if already known.
pub fn parse_cone(v: &Value, d: Option<usize>, path: &str) -> Result<Cone> {
    let obj = object(v, path)?;
    check_keys(obj, &["kind", "dimension", "w", "b", "g"], path)?;
    let declared = match obj.get("dimension") {
        Some(x) => Some(uint(x, &format!("{path}.dimension"))? as usize),
        None => None,
    };
    let d = match (d, declared) {
        (Some(a), Some(b)) if a != b => {
            return Err(invalid(
                &format!("{path}.dimension"),
                format!("dimension mismatch: expected {a}, found {b}"),
            ))
        }
        (Some(a), _) | (None, Some(a)) => a,
        (None, None) => return Err(invalid(path, "missing field `dimension`")),
    };
    if d == 0 {
        return Err(invalid(path, "dimension must be positive"));
    }
    let kind = string(field(obj, "kind", path)?, &format!("{path}.kind"))?;
    let cone = match kind {
        "componentwise" => Cone::componentwise(d),
        "halfspace" => {
            let w = vector(field(obj, "w", path)?, d, &format!("{path}.w"))?;
            Cone::halfspace(w).map_err(|e| within(&format!("{path}.w"), e))?
        }
        "dual" | "generators" => {
            let b = match obj.get("b") {
                Some(x) => Some(vectors(x, d, &format!("{path}.b"))?),
                None => None,
            };
            let g = match obj.get("g") {
                Some(x) => Some(vectors(x, d, &format!("{path}.g"))?),
                None => None,
            };
            let built = match (kind, b, g) {
                ("dual", Some(b), g) => Cone::from_dual(d, b).and_then(|c| match g {
                    Some(g) => c.with_generators(g),
                    None => Ok(c),
                }),
                ("generators", b, Some(g)) => Cone::from_generators(d, g).and_then(|c| match b {
                    Some(b) => c.with_dual(b),
                    None => Ok(c),
                }),
                ("dual", None, _) => return Err(invalid(path, "missing field `b`")),
                _ => return Err(invalid(path, "missing field `g`")),
            };
            built.map_err(|e| within(path, e))?
        }
        other => return Err(invalid(&format!("{path}.kind"), format!("unknown cone kind `{other}`"))),
    };
    Ok(cone)
}

fn parse_tree(v: &Value) -> Result<ScenarioTree> {
    let obj = object(v, "tree")?;
    check_keys(obj, &["root", "children", "labels"], "tree")?;
    let root = string(field(obj, "root", "tree")?, "tree.root")?;
    let mut children = Vec::new();
    for (parent, cs) in object(field(obj, "children", "tree")?, "tree.children")? {
        let path = format!("tree.children.{parent}");
        let names = array(cs, &path)?
            .iter()
            .enumerate()
            .map(|(i, c)| string(c, &format!("{path}[{i}]")).map(str::to_string))
            .collect::<Result<Vec<_>>>()?;
        children.push((parent.clone(), names));
    }
    let mut labels = HashMap::new();
    if let Some(l) = obj.get("labels") {
        for (n, label) in object(l, "tree.labels")? {
            labels.insert(n.clone(), string(label, &format!("tree.labels.{n}"))?.to_string());
        }
    }
    ScenarioTree::build(root, &children, &labels).map_err(|e| within("tree", e))
}

fn transition_vector(tree: &ScenarioTree, n: NodeId, v: &Value, path: &str) -> Result<Vec<Scalar>> {
    let p = scalars(v, path)?;
    check_probability_vector(&p, tree.children(n).len()).map_err(|m| invalid(path, m))?;
    Ok(p)
}

fn parse_models(v: &Value, tree: &ScenarioTree) -> Result<(ModelFamily, String)> {
    let obj = object(v, "models")?;
    check_keys(obj, &["label", "explicit", "marginals"], "models")?;
    let label = match obj.get("label") {
        Some(l) => string(l, "models.label")?.to_string(),
        None => DEFAULT_FAMILY_LABEL.to_string(),
    };
    let family = match (obj.get("explicit"), obj.get("marginals")) {
        (Some(_), Some(_)) => return Err(invalid("models", "give either `explicit` or `marginals`, not both")),
        (Some(list), None) => {
            let list = array(list, "models.explicit")?;
            if list.is_empty() {
                return Err(invalid("models.explicit", "Θ must be nonempty"));
            }
            let mut models = Vec::new();
            for (k, m) in list.iter().enumerate() {
                let path = format!("models.explicit[{k}]");
                let mo = object(m, &path)?;
                check_keys(mo, &["id", "transition"], &path)?;
                let id = string(field(mo, "id", &path)?, &format!("{path}.id"))?;
                let tpath = format!("{path}.transition");
                let mut trans = Vec::new();
                for (name, p) in object(field(mo, "transition", &path)?, &tpath)? {
                    let npath = format!("{tpath}.{name}");
                    let n = node(tree, name, &npath)?;
                    if tree.is_leaf(n) {
                        return Err(invalid(&npath, format!("leaf `{name}` has no transition")));
                    }
                    trans.push((n, transition_vector(tree, n, p, &npath)?));
                }
                models.push(Model::new(tree, id, trans).map_err(|e| within(&tpath, e))?);
            }
            ModelFamily::new(tree, models).map_err(|e| within("models.explicit", e))?
        }
        (None, Some(marg)) => {
            let mut entries = Vec::new();
            for (name, cands) in object(marg, "models.marginals")? {
                let path = format!("models.marginals.{name}");
                let n = node(tree, name, &path)?;
                let list = array(cands, &path)?;
                if list.is_empty() {
                    return Err(invalid(&path, "Θ must be nonempty"));
                }
                let ps = list
                    .iter()
                    .enumerate()
                    .map(|(i, p)| transition_vector(tree, n, p, &format!("{path}[{i}]")))
                    .collect::<Result<Vec<_>>>()?;
                entries.push((n, ps));
            }
            let sets = MarginalSets::new(tree, entries).map_err(|e| within("models.marginals", e))?;
            rectangularize(tree, &sets).map_err(|e| within("models.marginals", e))?
        }
        (None, None) => return Err(invalid("models", "missing field `explicit` or `marginals`")),
    };
    Ok((family, label))
}

fn parse_tabulated(v: &Value, tree: &ScenarioTree, d: usize) -> Result<Tabulated> {
    let path = "problem.tabulated";
    let obj = object(v, path)?;
    check_keys(obj, &["strategies"], path)?;
    let list = array(field(obj, "strategies", path)?, &format!("{path}.strategies"))?;
    if list.is_empty() {
        return Err(invalid(&format!("{path}.strategies"), "empty control set"));
    }
    let leaves = tree.level(tree.horizon());
    let mut strategies = Vec::new();
    for (k, s) in list.iter().enumerate() {
        let spath = format!("{path}.strategies[{k}]");
        let so = object(s, &spath)?;
        check_keys(so, &["name", "loss", "controls"], &spath)?;
        let name = string(field(so, "name", &spath)?, &format!("{spath}.name"))?.to_string();
        if strategies.iter().any(|x: &TabulatedStrategy| x.name == name) {
            return Err(invalid(&format!("{spath}.name"), format!("duplicate strategy `{name}`")));
        }
        let lpath = format!("{spath}.loss");
        let lo = object(field(so, "loss", &spath)?, &lpath)?;
        let mut loss = vec![None; leaves.len()];
        for (leaf, x) in lo {
            let p = format!("{lpath}.{leaf}");
            let n = node(tree, leaf, &p)?;
            if !tree.is_leaf(n) {
                return Err(invalid(&p, format!("`{leaf}` is not a leaf")));
            }
            loss[tree.position(n)] = Some(vector(x, d, &p)?);
        }
        let loss = loss
            .into_iter()
            .enumerate()
            .map(|(i, x)| x.ok_or_else(|| invalid(&lpath, format!("missing leaf `{}`", tree.name(leaves[i])))))
            .collect::<Result<Vec<_>>>()?;
        let mut controls = BTreeMap::new();
        if let Some(c) = so.get("controls") {
            let cpath = format!("{spath}.controls");
            for (name, a) in object(c, &cpath)? {
                let p = format!("{cpath}.{name}");
                let n = node(tree, name, &p)?;
                if tree.is_leaf(n) {
                    return Err(invalid(&p, format!("leaf `{name}` takes no control")));
                }
                controls.insert(n, string(a, &p)?.to_string());
            }
        }
        strategies.push(TabulatedStrategy { name, controls, loss });
    }
    Ok(Tabulated { strategies })
}

fn parse_dynamics(v: &Value, d: usize) -> Result<Dynamics> {
    let path = "problem.dynamics";
    let obj = object(v, path)?;
    check_keys(obj, &["initial", "admissible", "transitions", "loss"], path)?;
    let initial = State::new(string(field(obj, "initial", path)?, &format!("{path}.initial"))?);
    let mut dynamics = Dynamics {
        initial,
        ..Dynamics::default()
    };
    let apath = format!("{path}.admissible");
    for (i, a) in array(field(obj, "admissible", path)?, &apath)?.iter().enumerate() {
        let p = format!("{apath}[{i}]");
        let ao = object(a, &p)?;
        check_keys(ao, &["time", "state", "controls"], &p)?;
        let t = uint(field(ao, "time", &p)?, &format!("{p}.time"))? as usize;
        let s = State::new(string(field(ao, "state", &p)?, &format!("{p}.state"))?);
        let cpath = format!("{p}.controls");
        let cs = array(field(ao, "controls", &p)?, &cpath)?
            .iter()
            .enumerate()
            .map(|(j, c)| string(c, &format!("{cpath}[{j}]")).map(str::to_string))
            .collect::<Result<Vec<_>>>()?;
        if cs.is_empty() {
            return Err(invalid(&cpath, "empty control set"));
        }
        if dynamics.admissible.insert((t, s.clone()), cs).is_some() {
            return Err(invalid(&p, format!("duplicate control set for time {t}, state `{s}`")));
        }
    }
    let tpath = format!("{path}.transitions");
    for (i, tr) in array(field(obj, "transitions", path)?, &tpath)?.iter().enumerate() {
        let p = format!("{tpath}[{i}]");
        let to = object(tr, &p)?;
        check_keys(to, &["time", "state", "control", "label", "next"], &p)?;
        let t = uint(field(to, "time", &p)?, &format!("{p}.time"))? as usize;
        let s = State::new(string(field(to, "state", &p)?, &format!("{p}.state"))?);
        let a = string(field(to, "control", &p)?, &format!("{p}.control"))?.to_string();
        let label = match to.get("label") {
            Some(l) => string(l, &format!("{p}.label"))?.to_string(),
            None => ANY_LABEL.to_string(),
        };
        let next = State::new(string(field(to, "next", &p)?, &format!("{p}.next"))?);
        if dynamics.transitions.insert((t, s, a, label), next).is_some() {
            return Err(invalid(&p, "duplicate transition"));
        }
    }
    let lpath = format!("{path}.loss");
    for (s, x) in object(field(obj, "loss", path)?, &lpath)? {
        dynamics
            .loss
            .insert(State::new(s.as_str()), vector(x, d, &format!("{lpath}.{s}"))?);
    }
    Ok(dynamics)
}

fn parse_options(v: Option<&Value>) -> Result<(EngineOptions, String)> {
    let mut options = EngineOptions::default();
    let mut sup = "auto".to_string();
    if let Some(v) = v {
        let obj = object(v, "options")?;
        check_keys(obj, &["budget", "prune", "seed", "sup"], "options")?;
        if let Some(b) = obj.get("budget") {
            options.budget = uint(b, "options.budget")? as usize;
        }
        if let Some(p) = obj.get("prune") {
            options.prune = p.as_bool().ok_or_else(|| invalid("options.prune", "expected a boolean"))?;
        }
        if let Some(s) = obj.get("seed") {
            options.seed = Some(uint(s, "options.seed")?);
        }
        if let Some(s) = obj.get("sup") {
            sup = string(s, "options.sup")?.to_string();
        }
    }
    Ok((options, sup))
}

/// Parses and validates an instance document.
pub fn parse_instance(text: &str) -> Result<ControlledProblem> {
    let doc = parse_json(text)?;
    let root = object(&doc, "$")?;
    check_keys(
        root,
        &["version", "name", "dimension", "cone", "tree", "models", "problem", "options"],
        "$",
    )?;
    let version = uint(field(root, "version", "$")?, "version")?;
    if version != FORMAT_VERSION {
        return Err(invalid("version", format!("unsupported version {version}")));
    }
    let name = match root.get("name") {
        Some(n) => string(n, "name")?.to_string(),
        None => String::new(),
    };
    let d = uint(field(root, "dimension", "$")?, "dimension")? as usize;
    if d == 0 {
        return Err(invalid("dimension", "dimension must be positive"));
    }
    let cone = parse_cone(field(root, "cone", "$")?, Some(d), "cone")?;
    let tree = parse_tree(field(root, "tree", "$")?)?;
    let (family, label) = parse_models(field(root, "models", "$")?, &tree)?;
    let pobj = object(field(root, "problem", "$")?, "problem")?;
    let mode = match (pobj.get("tabulated"), pobj.get("dynamics")) {
        (Some(t), None) if pobj.len() == 1 => ProblemMode::Tabulated(parse_tabulated(t, &tree, d)?),
        (None, Some(x)) if pobj.len() == 1 => ProblemMode::Dynamics(parse_dynamics(x, d)?),
        _ => return Err(invalid("problem", "expected exactly one of `tabulated` or `dynamics`")),
    };
    let (options, sup) = parse_options(root.get("options"))?;
    let method = SupRegistry::default().get(&sup).map_err(|e| within("options.sup", e))?;
    let mut problem = ControlledProblem::new(name, tree, family, cone, mode).map_err(|e| within("problem", e))?;
    problem.family_label = label;
    Ok(problem.with_options(options).with_method(method))
}

fn scalar_value(x: &Scalar) -> Value {
    if x.is_integer() {
        if let Ok(n) = format_scalar(x).parse::<i64>() {
            return json!(n);
        }
    }
    Value::String(format_scalar(x))
}

pub fn vector_value(v: &VecD) -> Value {
    Value::Array(v.components().iter().map(scalar_value).collect())
}

fn cone_value(cone: &Cone) -> Value {
    match cone.kind() {
        ConeKind::ComponentWise => json!({ "kind": "componentwise" }),
        ConeKind::Halfspace(w) => json!({ "kind": "halfspace", "w": vector_value(w) }),
        kind => {
            let mut obj = Map::new();
            let name = if matches!(kind, ConeKind::PolyhedralDual) { "dual" } else { "generators" };
            obj.insert("kind".into(), json!(name));
            if let Some(b) = cone.dual() {
                obj.insert("b".into(), Value::Array(b.iter().map(vector_value).collect()));
            }
            if let Some(g) = cone.generators() {
                obj.insert("g".into(), Value::Array(g.iter().map(vector_value).collect()));
            }
            Value::Object(obj)
        }
    }
}

fn tree_value(tree: &ScenarioTree) -> Value {
    let mut children = Map::new();
    let mut labels = Map::new();
    for n in tree.node_ids() {
        if !tree.is_leaf(n) {
            let cs: Vec<Value> = tree.children(n).iter().map(|&c| json!(tree.name(c))).collect();
            children.insert(tree.name(n).to_string(), Value::Array(cs));
        }
        if tree.label(n) != tree.name(n) {
            labels.insert(tree.name(n).to_string(), json!(tree.label(n)));
        }
    }
    let mut obj = Map::new();
    obj.insert("root".into(), json!(tree.name(tree.root())));
    obj.insert("children".into(), Value::Object(children));
    if !labels.is_empty() {
        obj.insert("labels".into(), Value::Object(labels));
    }
    Value::Object(obj)
}

fn models_value(problem: &ControlledProblem) -> Value {
    let tree = &problem.tree;
    let explicit: Vec<Value> = problem
        .models()
        .iter()
        .map(|m| {
            let transition: Map<String, Value> = tree
                .internal_nodes()
                .map(|n| {
                    let p = m.transition(n).iter().map(scalar_value).collect();
                    (tree.name(n).to_string(), Value::Array(p))
                })
                .collect();
            json!({ "id": m.id, "transition": transition })
        })
        .collect();
    json!({ "label": problem.family_label, "explicit": explicit })
}

fn problem_value(problem: &ControlledProblem) -> Value {
    let tree = &problem.tree;
    match &problem.mode {
        ProblemMode::Tabulated(tab) => {
            let strategies: Vec<Value> = tab
                .strategies
                .iter()
                .map(|s| {
                    let loss: Map<String, Value> = tree
                        .level(tree.horizon())
                        .iter()
                        .map(|&n| (tree.name(n).to_string(), vector_value(&s.loss[tree.position(n)])))
                        .collect();
                    let mut obj = Map::new();
                    obj.insert("name".into(), json!(s.name));
                    obj.insert("loss".into(), Value::Object(loss));
                    if !s.controls.is_empty() {
                        let controls: Map<String, Value> = s
                            .controls
                            .iter()
                            .map(|(n, a)| (tree.name(*n).to_string(), json!(a)))
                            .collect();
                        obj.insert("controls".into(), Value::Object(controls));
                    }
                    Value::Object(obj)
                })
                .collect();
            json!({ "tabulated": { "strategies": strategies } })
        }
        ProblemMode::Dynamics(dy) => {
            let admissible: Vec<Value> = dy
                .admissible
                .iter()
                .map(|((t, s), cs)| json!({ "time": t, "state": s.0, "controls": cs }))
                .collect();
            let transitions: Vec<Value> = dy
                .transitions
                .iter()
                .map(|((t, s, a, l), next)| {
                    json!({ "time": t, "state": s.0, "control": a, "label": l, "next": next.0 })
                })
                .collect();
            let loss: Map<String, Value> = dy.loss.iter().map(|(s, v)| (s.0.clone(), vector_value(v))).collect();
            json!({ "dynamics": {
                "initial": dy.initial.0,
                "admissible": admissible,
                "transitions": transitions,
                "loss": loss,
            }})
        }
    }
}

/// Serializes a problem back into the instance format, with explicit models.
pub fn serialize_instance(problem: &ControlledProblem) -> String {
    let mut options = Map::new();
    if problem.options.budget != DEFAULT_BUDGET {
        options.insert("budget".into(), json!(problem.options.budget));
    }
    if problem.options.prune {
        options.insert("prune".into(), json!(true));
    }
    if let Some(seed) = problem.options.seed {
        options.insert("seed".into(), json!(seed));
    }
    if problem.sup.name() != "auto" {
        options.insert("sup".into(), json!(problem.sup.name()));
    }
    let mut doc = Map::new();
    doc.insert("version".into(), json!(FORMAT_VERSION));
    if !problem.name.is_empty() {
        doc.insert("name".into(), json!(problem.name));
    }
    doc.insert("dimension".into(), json!(problem.dim()));
    doc.insert("cone".into(), cone_value(&problem.cone));
    doc.insert("tree".into(), tree_value(&problem.tree));
    doc.insert("models".into(), models_value(problem));
    doc.insert("problem".into(), problem_value(problem));
    if !options.is_empty() {
        doc.insert("options".into(), Value::Object(options));
    }
    let mut out = serde_json::to_string_pretty(&Value::Object(doc)).expect("JSON values always serialize");
    out.push('\n');
    out
}

/// A cone document: a cone object carrying its own `dimension`.
pub fn parse_cone_file(text: &str) -> Result<Cone> {
    parse_cone(&parse_json(text)?, None, "$")
}

/// A list of points, either a bare array or `{"points": [...]}`.
pub fn parse_points(text: &str, d: usize) -> Result<Vec<VecD>> {
    let doc = parse_json(text)?;
    match &doc {
        Value::Object(obj) => vectors(field(obj, "points", "$")?, d, "points"),
        _ => vectors(&doc, d, "$"),
    }
}

/// Terminal test vectors: `{"vectors": [{leaf: [..], ...}, ...]}` or a bare array.
pub fn parse_test_vectors(text: &str, tree: &ScenarioTree, d: usize) -> Result<Vec<AdaptedVector>> {
    let doc = parse_json(text)?;
    let (list, base) = match &doc {
        Value::Object(obj) => (array(field(obj, "vectors", "$")?, "vectors")?, "vectors"),
        _ => (array(&doc, "$")?, "$"),
    };
    let horizon = tree.horizon();
    let leaves = tree.level(horizon);
    let mut out = Vec::new();
    for (k, v) in list.iter().enumerate() {
        let path = format!("{base}[{k}]");
        let obj = object(v, &path)?;
        let mut values = vec![None; leaves.len()];
        for (leaf, x) in obj {
            let p = format!("{path}.{leaf}");
            let n = node(tree, leaf, &p)?;
            if !tree.is_leaf(n) {
                return Err(invalid(&p, format!("`{leaf}` is not a leaf")));
            }
            values[tree.position(n)] = Some(vector(x, d, &p)?);
        }
        let values = values
            .into_iter()
            .enumerate()
            .map(|(i, x)| x.ok_or_else(|| invalid(&path, format!("missing leaf `{}`", tree.name(leaves[i])))))
            .collect::<Result<Vec<_>>>()?;
        out.push(AdaptedVector::new(tree, horizon, values)?);
    }
    Ok(out)
}
