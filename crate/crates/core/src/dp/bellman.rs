use std::fmt;

use crate::cone::Cone;
use crate::error::{Error, Result};
use crate::rectangular::is_m_rectangular;
use crate::scalar::VecD;

use super::engine::{LocalValues, ValueSet};
use super::problem::ControlledProblem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RelationClass {
    Weak,
    Strong,
    Equality,
}

impl fmt::Display for RelationClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RelationClass::Weak => "weak",
            RelationClass::Strong => "strong",
            RelationClass::Equality => "equality",
        })
    }
}

/// The checked relations between `V = 𝒱_t`, `R = 𝓡_t(𝒱_{t+1})` and `B = 𝓑_t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relation {
    RInVPlusC,
    VInRMinusC,
    BInVPlusC,
    VInBMinusC,
    VInRPlusC,
    RInVMinusC,
    VInBPlusC,
    BInVMinusC,
    VEqualsR,
    VEqualsB,
}

impl Relation {
    pub const ALL: [Relation; 10] = [
        Relation::RInVPlusC,
        Relation::VInRMinusC,
        Relation::BInVPlusC,
        Relation::VInBMinusC,
        Relation::VInRPlusC,
        Relation::RInVMinusC,
        Relation::VInBPlusC,
        Relation::BInVMinusC,
        Relation::VEqualsR,
        Relation::VEqualsB,
    ];

    pub fn class(self) -> RelationClass {
        use Relation::*;
        match self {
            RInVPlusC | VInRMinusC | BInVPlusC | VInBMinusC => RelationClass::Weak,
            VInRPlusC | RInVMinusC | VInBPlusC | BInVMinusC => RelationClass::Strong,
            VEqualsR | VEqualsB => RelationClass::Equality,
        }
    }

    pub fn label(self) -> &'static str {
        use Relation::*;
        match self {
            RInVPlusC => "R ⊆ V + C",
            VInRMinusC => "V ⊆ R − C",
            BInVPlusC => "B ⊆ V + C",
            VInBMinusC => "V ⊆ B − C",
            VInRPlusC => "V ⊆ R + C",
            RInVMinusC => "R ⊆ V − C",
            VInBPlusC => "V ⊆ B + C",
            BInVMinusC => "B ⊆ V − C",
            VEqualsR => "V = R",
            VEqualsB => "V = B",
        }
    }
}

/// An element that breaks a relation at one (node, state).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub node: String,
    pub state: String,
    pub element: VecD,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at node {}", self.element, self.node)?;
        if !self.state.is_empty() {
            write!(f, " state {}", self.state)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationCheck {
    pub time: usize,
    pub relation: Relation,
    pub holds: bool,
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BellmanReport {
    pub horizon: usize,
    pub checks: Vec<RelationCheck>,
    pub v: Vec<ValueSet>,
    pub r: Vec<ValueSet>,
    pub b: Vec<ValueSet>,
    pub m_rectangular: bool,
    pub componentwise: bool,
    pub pointed: bool,
    pub non_unique: bool,
}

impl BellmanReport {
    pub fn holds(&self, class: RelationClass) -> bool {
        self.checks.iter().filter(|c| c.relation.class() == class).all(|c| c.holds)
    }

    pub fn holds_at(&self, class: RelationClass, t: usize) -> bool {
        self.checks
            .iter()
            .filter(|c| c.time == t && c.relation.class() == class)
            .all(|c| c.holds)
    }

    pub fn check(&self, t: usize, relation: Relation) -> Option<&RelationCheck> {
        self.checks.iter().find(|c| c.time == t && c.relation == relation)
    }

    /// Weak relations hold everywhere but some strong relation fails.
    pub fn strictly_weak(&self) -> bool {
        self.holds(RelationClass::Weak) && !self.holds(RelationClass::Strong)
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    /// Strong relations are expected for m-rectangular families under the
    /// component-wise order.
    pub fn strong_expected(&self) -> bool {
        self.m_rectangular && self.componentwise
    }

    pub fn verdict(&self, class: RelationClass) -> &'static str {
        if self.holds(class) {
            "pass"
        } else {
            "FAIL"
        }
    }
}

/// First element of `x` lying outside `y + C`.
fn outside_upper(cone: &Cone, x: &[VecD], y: &[VecD]) -> Result<Option<VecD>> {
    for xi in x {
        let mut covered = false;
        for yj in y {
            if cone.leq(yj, xi)? {
                covered = true;
                break;
            }
        }
        if !covered {
            return Ok(Some(xi.clone()));
        }
    }
    Ok(None)
}

/// First element of `x` lying outside `y − C`.
fn outside_lower(cone: &Cone, x: &[VecD], y: &[VecD]) -> Result<Option<VecD>> {
    for xi in x {
        let mut covered = false;
        for yj in y {
            if cone.leq(xi, yj)? {
                covered = true;
                break;
            }
        }
        if !covered {
            return Ok(Some(xi.clone()));
        }
    }
    Ok(None)
}

fn set_difference(x: &[VecD], y: &[VecD]) -> Option<VecD> {
    x.iter().find(|v| !y.contains(v)).or_else(|| y.iter().find(|v| !x.contains(v))).cloned()
}

fn relation_witness(cone: &Cone, relation: Relation, v: &[VecD], r: &[VecD], b: &[VecD]) -> Result<Option<VecD>> {
    use Relation::*;
    match relation {
        RInVPlusC => outside_upper(cone, r, v),
        VInRMinusC => outside_lower(cone, v, r),
        BInVPlusC => outside_upper(cone, b, v),
        VInBMinusC => outside_lower(cone, v, b),
        VInRPlusC => outside_upper(cone, v, r),
        RInVMinusC => outside_lower(cone, r, v),
        VInBPlusC => outside_upper(cone, v, b),
        BInVMinusC => outside_lower(cone, b, v),
        VEqualsR => Ok(set_difference(v, r)),
        VEqualsB => Ok(set_difference(v, b)),
    }
}

/// Indices of the elements not dominated by another element of the set.
pub fn pareto_minimal(cone: &Cone, xs: &[VecD]) -> Result<Vec<usize>> {
    if !cone.is_pointed() {
        return Err(Error::UnsupportedCone("Pareto pruning needs a pointed cone".into()));
    }
    let mut keep = Vec::new();
    'outer: for (i, x) in xs.iter().enumerate() {
        for (j, y) in xs.iter().enumerate() {
            if i != j && y != x && cone.leq(y, x)? {
                continue 'outer;
            }
        }
        keep.push(i);
    }
    Ok(keep)
}

/// Drops dominated elements from every local set.
pub fn prune_pareto(vs: &ValueSet, cone: &Cone) -> Result<ValueSet> {
    let mut out = vs.clone();
    for l in &mut out.locals {
        let keep = pareto_minimal(cone, &l.elements)?;
        l.elements = keep.iter().map(|&i| l.elements[i].clone()).collect();
        l.provenance = keep.iter().map(|&i| l.provenance[i].clone()).collect();
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UpperImageFailure {
    pub time: usize,
    pub node: String,
    pub state: String,
    pub value: VecD,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UpperImageReport {
    pub generators: Vec<ValueSet>,
    pub combinations: usize,
    pub inclusion_failures: Vec<UpperImageFailure>,
    pub reverse_checked: bool,
    pub reverse_failures: Vec<UpperImageFailure>,
}

impl UpperImageReport {
    pub fn inclusion_holds(&self) -> bool {
        self.inclusion_failures.is_empty()
    }

    pub fn reverse_holds(&self) -> Option<bool> {
        self.reverse_checked.then_some(self.reverse_failures.is_empty())
    }

    pub fn summary(&self) -> String {
        format!("checked on {} selector/perturbation combinations", self.combinations)
    }
}

impl ControlledProblem {
    /// Every weak, strong and equality relation at every `t < T`.
    pub fn check_bellman(&self) -> Result<BellmanReport> {
        let v = self.value_functions()?;
        let b = self.backward_value()?;
        let horizon = self.horizon();
        let mut r = Vec::with_capacity(horizon);
        for t in 0..horizon {
            r.push(self.one_step(t, &v[t + 1])?);
        }
        let mut checks = Vec::new();
        for t in 0..horizon {
            for relation in Relation::ALL {
                let mut witness = None;
                for lv in &v[t].locals {
                    let lr = r[t].elements(lv.node, &lv.state)?;
                    let lb = b[t].elements(lv.node, &lv.state)?;
                    if let Some(element) = relation_witness(&self.cone, relation, &lv.elements, lr, lb)? {
                        witness = Some(Witness {
                            node: self.tree.name(lv.node).to_string(),
                            state: lv.state.0.clone(),
                            element,
                        });
                        break;
                    }
                }
                checks.push(RelationCheck {
                    time: t,
                    relation,
                    holds: witness.is_none(),
                    witness,
                });
            }
        }
        let non_unique = v.iter().chain(&r).chain(&b).any(ValueSet::non_unique);
        Ok(BellmanReport {
            horizon,
            checks,
            m_rectangular: is_m_rectangular(&self.tree, &self.family),
            componentwise: self.cone.is_componentwise(),
            pointed: self.cone.is_pointed(),
            non_unique,
            v,
            r,
            b,
        })
    }

    fn require_componentwise(&self) -> Result<()> {
        if !self.cone.is_componentwise() {
            return Err(Error::UnsupportedCone(
                "upper images are defined for the component-wise order".into(),
            ));
        }
        Ok(())
    }

    /// Pareto generators of the upper image `𝒫_t = 𝒱_t + ℝᵈ₊`.
    pub fn upper_image(&self, t: usize) -> Result<ValueSet> {
        self.require_componentwise()?;
        prune_pareto(&self.value_function(t)?, &self.cone)
    }

    /// One-step image of the time-`t+1` upper images, sampled on generators and on
    /// generators shifted by `e_i` or `1` (on all children or on one child), compared
    /// with `𝒫_t`. Under m-rectangularity the reverse inclusion is checked on the
    /// generators of `𝒫_t`.
    pub fn check_upper_image_recursion(&self) -> Result<UpperImageReport> {
        self.require_componentwise()?;
        let d = self.dim();
        let generators = self
            .value_functions()?
            .iter()
            .map(|v| prune_pareto(v, &self.cone))
            .collect::<Result<Vec<_>>>()?;
        let rect = is_m_rectangular(&self.tree, &self.family);
        let mut shifts = vec![VecD::zeros(d)];
        shifts.extend((0..d).map(|i| VecD::unit(d, i)));
        shifts.push(VecD::ones(d));
        let sys = self.system();
        let models = self.models();
        let mut combinations = 0usize;
        let mut inclusion_failures = Vec::new();
        let mut reverse_failures = Vec::new();
        for t in 0..self.horizon() {
            for lg in &generators[t].locals {
                let LocalValues { node, state, .. } = lg;
                let children = self.tree.children(*node);
                let mut masks: Vec<Vec<bool>> = vec![vec![true; children.len()]];
                if children.len() > 1 {
                    masks.extend((0..children.len()).map(|j| (0..children.len()).map(|i| i == j).collect()));
                }
                let mut unshifted = Vec::new();
                for a in sys.admissible(&self.tree, t, *node, state)? {
                    let mut sets = Vec::with_capacity(children.len());
                    for &c in children {
                        let cs = sys.next_state(&self.tree, t, *node, state, &a, c)?;
                        sets.push(generators[t + 1].elements(c, &cs)?);
                    }
                    let total = sets.iter().map(|s| s.len()).product::<usize>();
                    let mut idx = vec![0usize; sets.len()];
                    for _ in 0..total {
                        for (k, delta) in shifts.iter().enumerate() {
                            let mask_list: &[Vec<bool>] = if k == 0 { &masks[..1] } else { &masks };
                            for mask in mask_list {
                                combinations += 1;
                                if combinations > self.options.budget {
                                    return Err(Error::DeskScaleExceeded {
                                        what: "upper-image combinations",
                                        actual: combinations,
                                        limit: self.options.budget,
                                    });
                                }
                                let per_model: Vec<VecD> = models
                                    .iter()
                                    .map(|m| {
                                        let mut acc = VecD::zeros(d);
                                        for (i, set) in sets.iter().enumerate() {
                                            acc.add_scaled(m.prob(*node, i), &set[idx[i]]);
                                            if mask[i] {
                                                acc.add_scaled(m.prob(*node, i), delta);
                                            }
                                        }
                                        acc
                                    })
                                    .collect();
                                let value = self.sup.supremum(&self.cone, &per_model)?.value().cloned().ok_or_else(|| {
                                    Error::SupNotExists {
                                        node: self.tree.name(*node).to_string(),
                                        context: format!(" (control {a})"),
                                    }
                                })?;
                                let mut covered = false;
                                for g in &lg.elements {
                                    if self.cone.leq(g, &value)? {
                                        covered = true;
                                        break;
                                    }
                                }
                                if !covered {
                                    inclusion_failures.push(UpperImageFailure {
                                        time: t,
                                        node: self.tree.name(*node).to_string(),
                                        state: state.0.clone(),
                                        value: value.clone(),
                                    });
                                }
                                if k == 0 {
                                    unshifted.push(value);
                                }
                            }
                        }
                        for i in (0..idx.len()).rev() {
                            idx[i] += 1;
                            if idx[i] < sets[i].len() {
                                break;
                            }
                            idx[i] = 0;
                        }
                    }
                }
                if rect {
                    for g in &lg.elements {
                        let mut reached = false;
                        for u in &unshifted {
                            if self.cone.leq(u, g)? {
                                reached = true;
                                break;
                            }
                        }
                        if !reached {
                            reverse_failures.push(UpperImageFailure {
                                time: t,
                                node: self.tree.name(*node).to_string(),
                                state: state.0.clone(),
                                value: g.clone(),
                            });
                        }
                    }
                }
            }
        }
        Ok(UpperImageReport {
            generators,
            combinations,
            inclusion_failures,
            reverse_checked: rect,
            reverse_failures,
        })
    }
}
