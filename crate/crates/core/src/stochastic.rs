//! Finite scenario trees, model families, adapted vectors and conditional expectation.

use std::collections::{HashMap, HashSet};
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::cone::Cone;
use crate::error::{Error, Result};
use crate::scalar::{format_scalar, Scalar, VecD};
use crate::vsup::{SupResult, SupStatus, SupremumMethod};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub usize);

#[derive(Debug, Clone, PartialEq, Eq)]
struct Node {
    name: String,
    time: usize,
    parent: Option<NodeId>,
    children: Vec<NodeId>,
    label: String,
    position: usize,
}

/// Rooted tree whose level `t` holds the atoms of `F_t`. Leaves are exactly the
/// nodes at the horizon.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioTree {
    nodes: Vec<Node>,
    levels: Vec<Vec<NodeId>>,
    by_name: HashMap<String, NodeId>,
}

impl ScenarioTree {
    /// Builds a tree from its root name and a children adjacency list.
    /// `labels` optionally assigns a branch label to a child node (defaults to its name).
    pub fn build(
        root: &str,
        children: &[(String, Vec<String>)],
        labels: &HashMap<String, String>,
    ) -> Result<Self> {
        let adjacency: HashMap<&str, &Vec<String>> =
            children.iter().map(|(p, cs)| (p.as_str(), cs)).collect();
        if adjacency.len() != children.len() {
            return Err(Error::InvalidTree("a node has two children lists".into()));
        }
        let mut tree = ScenarioTree {
            nodes: Vec::new(),
            levels: Vec::new(),
            by_name: HashMap::new(),
        };
        tree.push_node(root, 0, None)?;
        let mut frontier = vec![NodeId(0)];
        loop {
            let mut next = Vec::new();
            for &id in &frontier {
                let name = tree.nodes[id.0].name.clone();
                if let Some(cs) = adjacency.get(name.as_str()) {
                    if cs.is_empty() {
                        return Err(Error::InvalidTree(format!("node `{name}` has an empty children list")));
                    }
                    let t = tree.nodes[id.0].time + 1;
                    for c in cs.iter() {
                        let cid = tree.push_node(c, t, Some(id))?;
                        tree.nodes[id.0].children.push(cid);
                        next.push(cid);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            frontier = next;
        }
        for p in adjacency.keys() {
            if !tree.by_name.contains_key(*p) {
                return Err(Error::InvalidTree(format!("node `{p}` is not reachable from the root")));
            }
        }
        let horizon = tree.levels.len() - 1;
        if horizon == 0 {
            return Err(Error::InvalidTree("horizon must be at least 1".into()));
        }
        for n in &tree.nodes {
            if n.children.is_empty() && n.time != horizon {
                return Err(Error::InvalidTree(format!(
                    "leaf `{}` at time {} is before the horizon {horizon}",
                    n.name, n.time
                )));
            }
        }
        for (name, label) in labels {
            let id = tree
                .by_name
                .get(name)
                .ok_or_else(|| Error::InvalidTree(format!("label for unknown node `{name}`")))?;
            tree.nodes[id.0].label = label.clone();
        }
        Ok(tree)
    }

    fn push_node(&mut self, name: &str, time: usize, parent: Option<NodeId>) -> Result<NodeId> {
        if self.by_name.contains_key(name) {
            return Err(Error::InvalidTree(format!("duplicate node `{name}`")));
        }
        let id = NodeId(self.nodes.len());
        if self.levels.len() <= time {
            self.levels.push(Vec::new());
        }
        let position = self.levels[time].len();
        self.levels[time].push(id);
        self.nodes.push(Node {
            name: name.to_string(),
            time,
            parent,
            children: Vec::new(),
            label: name.to_string(),
            position,
        });
        self.by_name.insert(name.to_string(), id);
        Ok(id)
    }

    /// A tree where every node at time `t` has `branching[t]` children, named by path.
    pub fn uniform(branching: &[usize]) -> Result<Self> {
        let mut children = Vec::new();
        let mut level = vec!["r".to_string()];
        for &k in branching {
            let mut next = Vec::new();
            for p in &level {
                let cs: Vec<String> = (0..k).map(|i| format!("{p}.{i}")).collect();
                next.extend(cs.iter().cloned());
                children.push((p.clone(), cs));
            }
            level = next;
        }
        ScenarioTree::build("r", &children, &HashMap::new())
    }

    /// The two-period up/down tree with nodes `root, u, d, uu, ud, du, dd`.
    pub fn binomial() -> Self {
        let children = vec![
            ("root".to_string(), vec!["u".to_string(), "d".to_string()]),
            ("u".to_string(), vec!["uu".to_string(), "ud".to_string()]),
            ("d".to_string(), vec!["du".to_string(), "dd".to_string()]),
        ];
        ScenarioTree::build("root", &children, &HashMap::new()).expect("static tree")
    }

    pub fn horizon(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn root(&self) -> NodeId {
        NodeId(0)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn level(&self, t: usize) -> &[NodeId] {
        &self.levels[t]
    }

    pub fn levels(&self) -> &[Vec<NodeId>] {
        &self.levels
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> {
        (0..self.nodes.len()).map(NodeId)
    }

    pub fn children(&self, n: NodeId) -> &[NodeId] {
        &self.nodes[n.0].children
    }

    pub fn parent(&self, n: NodeId) -> Option<NodeId> {
        self.nodes[n.0].parent
    }

    pub fn time(&self, n: NodeId) -> usize {
        self.nodes[n.0].time
    }

    pub fn name(&self, n: NodeId) -> &str {
        &self.nodes[n.0].name
    }

    pub fn label(&self, n: NodeId) -> &str {
        &self.nodes[n.0].label
    }

    /// Index of `n` within its time level.
    pub fn position(&self, n: NodeId) -> usize {
        self.nodes[n.0].position
    }

    pub fn is_leaf(&self, n: NodeId) -> bool {
        self.nodes[n.0].children.is_empty()
    }

    pub fn lookup(&self, name: &str) -> Option<NodeId> {
        self.by_name.get(name).copied()
    }

    /// Non-terminal nodes in creation (breadth-first) order.
    pub fn internal_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.node_ids().filter(|&n| !self.is_leaf(n))
    }

    /// Ancestors of `n` from the root down, excluding `n`.
    pub fn ancestors(&self, n: NodeId) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut cur = self.parent(n);
        while let Some(p) = cur {
            out.push(p);
            cur = self.parent(p);
        }
        out.reverse();
        out
    }

    /// Time-`s` descendants of `n` (or `n` itself when `s` is its own time).
    pub fn descendants_at(&self, n: NodeId, s: usize) -> Vec<NodeId> {
        let mut frontier = vec![n];
        for _ in self.time(n)..s {
            frontier = frontier.iter().flat_map(|&m| self.children(m).iter().copied()).collect();
        }
        frontier
    }
}

/// One probability model: a transition vector at every non-terminal node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    pub id: String,
    transition: Vec<Option<Vec<Scalar>>>,
}

impl Model {
    /// `transitions` maps each non-terminal node to a probability vector over its children.
    pub fn new(
        tree: &ScenarioTree,
        id: impl Into<String>,
        transitions: impl IntoIterator<Item = (NodeId, Vec<Scalar>)>,
    ) -> Result<Self> {
        let id = id.into();
        let mut transition = vec![None; tree.len()];
        for (n, p) in transitions {
            if n.0 >= tree.len() {
                return Err(Error::InvalidModel(format!("model `{id}`: unknown node")));
            }
            transition[n.0] = Some(p);
        }
        let m = Model { id, transition };
        m.validate(tree)?;
        Ok(m)
    }

    pub fn validate(&self, tree: &ScenarioTree) -> Result<()> {
        if self.transition.len() != tree.len() {
            return Err(Error::InvalidModel(format!("model `{}` does not match the tree", self.id)));
        }
        for n in tree.node_ids() {
            let name = tree.name(n);
            match (&self.transition[n.0], tree.is_leaf(n)) {
                (Some(_), true) => {
                    return Err(Error::InvalidModel(format!(
                        "model `{}`: leaf `{name}` has a transition",
                        self.id
                    )))
                }
                (None, false) => {
                    return Err(Error::InvalidModel(format!(
                        "model `{}`: node `{name}` has no transition",
                        self.id
                    )))
                }
                (Some(p), false) => check_probability_vector(p, tree.children(n).len())
                    .map_err(|msg| Error::InvalidModel(format!("model `{}` at `{name}`: {msg}", self.id)))?,
                (None, true) => {}
            }
        }
        Ok(())
    }

    pub fn transition(&self, n: NodeId) -> &[Scalar] {
        self.transition[n.0].as_deref().unwrap_or(&[])
    }

    /// Probability of moving from `parent` to its `i`-th child.
    pub fn prob(&self, parent: NodeId, i: usize) -> &Scalar {
        &self.transition(parent)[i]
    }

    pub(crate) fn assignment(&self) -> &[Option<Vec<Scalar>>] {
        &self.transition
    }

    pub(crate) fn from_assignment(id: String, transition: Vec<Option<Vec<Scalar>>>) -> Self {
        Model { id, transition }
    }
}

pub fn check_probability_vector(p: &[Scalar], arity: usize) -> std::result::Result<(), String> {
    if p.len() != arity {
        return Err(format!("expected {arity} probabilities, found {}", p.len()));
    }
    if let Some(x) = p.iter().find(|x| x.is_negative()) {
        return Err(format!("negative probability {}", format_scalar(x)));
    }
    let sum = p.iter().fold(Scalar::zero(), |a, x| a + x);
    if !sum.is_one() {
        return Err(format!("sum {} ≠ 1", format_scalar(&sum)));
    }
    Ok(())
}

/// A finite nonempty family Θ of models on one tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelFamily {
    models: Vec<Model>,
}

impl ModelFamily {
    pub fn new(tree: &ScenarioTree, models: Vec<Model>) -> Result<Self> {
        if models.is_empty() {
            return Err(Error::InvalidModel("Θ must be nonempty".into()));
        }
        let mut ids = HashSet::new();
        for m in &models {
            m.validate(tree)?;
            if !ids.insert(m.id.as_str()) {
                return Err(Error::InvalidModel(format!("duplicate model id `{}`", m.id)));
            }
        }
        Ok(ModelFamily { models })
    }

    pub fn models(&self) -> &[Model] {
        &self.models
    }

    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&Model> {
        self.models.iter().find(|m| m.id == id)
    }

    /// Sub-family with the given ids, in the given order.
    pub fn subset(&self, tree: &ScenarioTree, ids: &[&str]) -> Result<Self> {
        let models = ids
            .iter()
            .map(|id| {
                self.get(id)
                    .cloned()
                    .ok_or_else(|| Error::InvalidModel(format!("unknown model `{id}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        ModelFamily::new(tree, models)
    }
}

/// An `F_t`-measurable random vector: one value per time-`t` node, in level order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AdaptedVector {
    pub time: usize,
    pub values: Vec<VecD>,
}

impl AdaptedVector {
    pub fn new(tree: &ScenarioTree, time: usize, values: Vec<VecD>) -> Result<Self> {
        if time > tree.horizon() {
            return Err(Error::TimeOutOfRange {
                time,
                horizon: tree.horizon(),
            });
        }
        if values.len() != tree.level(time).len() {
            return Err(Error::InvalidProblem(format!(
                "adapted vector at time {time} needs {} values, got {}",
                tree.level(time).len(),
                values.len()
            )));
        }
        if let Some(first) = values.first() {
            let d = first.dim();
            values.iter().try_for_each(|v| v.check_dim(d))?;
        }
        Ok(AdaptedVector { time, values })
    }

    pub fn constant(tree: &ScenarioTree, time: usize, v: VecD) -> Self {
        AdaptedVector {
            time,
            values: vec![v; tree.level(time).len()],
        }
    }

    pub fn dim(&self) -> usize {
        self.values.first().map_or(0, VecD::dim)
    }

    pub fn at(&self, tree: &ScenarioTree, n: NodeId) -> &VecD {
        &self.values[tree.position(n)]
    }

    pub fn add(&self, other: &AdaptedVector) -> AdaptedVector {
        AdaptedVector {
            time: self.time,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        }
    }
}

impl fmt::Display for AdaptedVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.values.iter().map(ToString::to_string).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// `E^θ[x | F_t]` for `x` adapted at time `s ≥ t`.
pub fn cond_expect(
    tree: &ScenarioTree,
    model: &Model,
    x: &AdaptedVector,
    t: usize,
) -> Result<AdaptedVector> {
    let s = x.time;
    if s > tree.horizon() {
        return Err(Error::TimeOutOfRange {
            time: s,
            horizon: tree.horizon(),
        });
    }
    if t > s {
        return Err(Error::TimeOutOfRange { time: t, horizon: s });
    }
    if x.values.len() != tree.level(s).len() {
        return Err(Error::InvalidProblem(format!(
            "adapted vector is not defined on the time-{s} nodes"
        )));
    }
    let d = x.dim();
    let mut cur = x.values.clone();
    for level in (t..s).rev() {
        cur = tree
            .level(level)
            .iter()
            .map(|&n| {
                let mut acc = VecD::zeros(d);
                for (i, &c) in tree.children(n).iter().enumerate() {
                    acc.add_scaled(model.prob(n, i), &cur[tree.position(c)]);
                }
                acc
            })
            .collect();
    }
    Ok(AdaptedVector { time: t, values: cur })
}

/// Node-wise `x ⪯ y`.
pub fn leq_t(cone: &Cone, x: &AdaptedVector, y: &AdaptedVector) -> Result<bool> {
    if x.time != y.time || x.values.len() != y.values.len() {
        return Err(Error::InvalidProblem("adapted vectors live at different times".into()));
    }
    for (a, b) in x.values.iter().zip(&y.values) {
        if !cone.leq(a, b)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AdaptedStatus {
    Unique(AdaptedVector),
    NonUniqueWitness(AdaptedVector),
    NotExists { node: NodeId },
}

/// Supremum of a family of adapted vectors, computed atom by atom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdaptedSup {
    pub status: AdaptedStatus,
    pub per_node: Vec<SupResult>,
}

impl AdaptedSup {
    pub fn value(&self) -> Option<&AdaptedVector> {
        match &self.status {
            AdaptedStatus::Unique(v) | AdaptedStatus::NonUniqueWitness(v) => Some(v),
            AdaptedStatus::NotExists { .. } => None,
        }
    }
}

pub fn vsup_adapted(
    method: &dyn SupremumMethod,
    cone: &Cone,
    tree: &ScenarioTree,
    xs: &[AdaptedVector],
) -> Result<AdaptedSup> {
    let first = xs.first().ok_or(Error::Empty("supremum of an empty collection"))?;
    let t = first.time;
    if xs.iter().any(|x| x.time != t || x.values.len() != first.values.len()) {
        return Err(Error::InvalidProblem("adapted vectors live at different times".into()));
    }
    let mut per_node = Vec::with_capacity(first.values.len());
    let mut values = Vec::with_capacity(first.values.len());
    let mut unique = true;
    let mut missing = None;
    for (k, &n) in tree.level(t).iter().enumerate() {
        let column: Vec<VecD> = xs.iter().map(|x| x.values[k].clone()).collect();
        let r = method.supremum(cone, &column)?;
        match &r.status {
            SupStatus::Unique(v) => values.push(v.clone()),
            SupStatus::NonUniqueWitness(v) => {
                unique = false;
                values.push(v.clone());
            }
            SupStatus::NotExists => {
                missing.get_or_insert(n);
            }
        }
        per_node.push(r);
    }
    let status = match missing {
        Some(node) => AdaptedStatus::NotExists { node },
        None if unique => AdaptedStatus::Unique(AdaptedVector { time: t, values }),
        None => AdaptedStatus::NonUniqueWitness(AdaptedVector { time: t, values }),
    };
    Ok(AdaptedSup { status, per_node })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;
    use crate::vsup::AutoSup;

    fn up(tree: &ScenarioTree, id: &str, pu: Scalar, puu: Scalar, pud: Scalar) -> Model {
        let one = Scalar::one();
        let v = |p: Scalar| vec![p.clone(), &one - &p];
        Model::new(
            tree,
            id,
            vec![
                (tree.lookup("root").unwrap(), v(pu)),
                (tree.lookup("u").unwrap(), v(puu)),
                (tree.lookup("d").unwrap(), v(pud)),
            ],
        )
        .unwrap()
    }

    fn phi(tree: &ScenarioTree) -> AdaptedVector {
        AdaptedVector::new(
            tree,
            2,
            vec![
                VecD::from_ints(&[8, 0]),
                VecD::from_ints(&[0, 8]),
                VecD::from_ints(&[0, 0]),
                VecD::from_ints(&[8, 8]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn binomial_tree_shape() {
        let t = ScenarioTree::binomial();
        assert_eq!(t.horizon(), 2);
        assert_eq!(t.level(2).len(), 4);
        let names: Vec<&str> = t.level(2).iter().map(|&n| t.name(n)).collect();
        assert_eq!(names, vec!["uu", "ud", "du", "dd"]);
        assert_eq!(t.descendants_at(t.root(), 2).len(), 4);
    }

    #[test]
    fn rejects_malformed_trees() {
        let c = |p: &str, cs: &[&str]| (p.to_string(), cs.iter().map(|s| s.to_string()).collect());
        let none = HashMap::new();
        // unbalanced leaves
        assert!(ScenarioTree::build("r", &[c("r", &["a", "b"]), c("a", &["x"])], &none).is_err());
        // duplicate id
        assert!(ScenarioTree::build("r", &[c("r", &["a", "a"])], &none).is_err());
        // dangling parent
        assert!(ScenarioTree::build("r", &[c("r", &["a"]), c("z", &["y"])], &none).is_err());
        // no horizon
        assert!(ScenarioTree::build("r", &[], &none).is_err());
    }

    #[test]
    fn theta1_expectations() {
        let t = ScenarioTree::binomial();
        let m = up(&t, "theta1", ratio(1, 4), ratio(1, 2), ratio(1, 2));
        let e1 = cond_expect(&t, &m, &phi(&t), 1).unwrap();
        assert_eq!(e1.values, vec![VecD::from_ints(&[4, 4]); 2]);
        let e0 = cond_expect(&t, &m, &phi(&t), 0).unwrap();
        assert_eq!(e0.values, vec![VecD::from_ints(&[4, 4])]);
        let c = AdaptedVector::constant(&t, 2, VecD::from_ratios(&[(7, 3), (-1, 5)]));
        assert_eq!(cond_expect(&t, &m, &c, 0).unwrap().values[0], VecD::from_ratios(&[(7, 3), (-1, 5)]));
        assert!(cond_expect(&t, &m, &e1, 2).is_err());
    }

    #[test]
    fn probability_vectors_are_validated() {
        let t = ScenarioTree::binomial();
        let bad = Model::new(
            &t,
            "bad",
            vec![
                (t.lookup("root").unwrap(), vec![ratio(1, 4), ratio(1, 2)]),
                (t.lookup("u").unwrap(), vec![ratio(1, 2), ratio(1, 2)]),
                (t.lookup("d").unwrap(), vec![ratio(1, 2), ratio(1, 2)]),
            ],
        );
        let err = bad.unwrap_err().to_string();
        assert!(err.contains("sum 3/4 ≠ 1"), "{err}");
        assert!(ModelFamily::new(&t, vec![]).is_err());
    }

    #[test]
    fn nodewise_order_and_sup() {
        let t = ScenarioTree::binomial();
        let c = Cone::componentwise(2);
        let x = AdaptedVector::new(&t, 1, vec![VecD::from_ints(&[6, 2]), VecD::from_ints(&[2, 2])]).unwrap();
        let y = AdaptedVector::new(&t, 1, vec![VecD::from_ints(&[6, 4]), VecD::from_ints(&[4, 4])]).unwrap();
        assert!(leq_t(&c, &x, &y).unwrap());
        let swapped =
            AdaptedVector::new(&t, 1, vec![VecD::from_ints(&[0, 1]), VecD::from_ints(&[0, 0])]).unwrap();
        let orig = AdaptedVector::new(&t, 1, vec![VecD::from_ints(&[1, 0]), VecD::from_ints(&[0, 0])]).unwrap();
        assert!(!leq_t(&c, &orig, &swapped).unwrap());
        let s = vsup_adapted(&AutoSup, &c, &t, std::slice::from_ref(&x)).unwrap();
        assert_eq!(s.status, AdaptedStatus::Unique(x.clone()));
        let s = vsup_adapted(&AutoSup, &c, &t, &[x, y.clone()]).unwrap();
        assert_eq!(s.status, AdaptedStatus::Unique(y));
    }
}
