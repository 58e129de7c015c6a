//! Rectangular model families: construction from node-wise marginals, the structural
//! m-rectangularity test and an empirical check of preorder rectangularity.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cone::Cone;
use crate::error::{Error, Result};
use crate::scalar::{ratio, Scalar, VecD};
use crate::stochastic::{
    check_probability_vector, cond_expect, leq_t, vsup_adapted, AdaptedVector, Model, ModelFamily,
    NodeId, ScenarioTree,
};
use crate::vsup::SupremumMethod;

/// Candidate transition vectors per non-terminal node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarginalSets {
    candidates: Vec<Vec<Vec<Scalar>>>,
}

impl MarginalSets {
    pub fn new(
        tree: &ScenarioTree,
        per_node: impl IntoIterator<Item = (NodeId, Vec<Vec<Scalar>>)>,
    ) -> Result<Self> {
        let mut candidates = vec![Vec::new(); tree.len()];
        for (n, cs) in per_node {
            if tree.is_leaf(n) {
                return Err(Error::InvalidModel(format!(
                    "marginals given for leaf `{}`",
                    tree.name(n)
                )));
            }
            for p in &cs {
                check_probability_vector(p, tree.children(n).len()).map_err(|msg| {
                    Error::InvalidModel(format!("marginal at `{}`: {msg}", tree.name(n)))
                })?;
            }
            let mut seen = BTreeSet::new();
            candidates[n.0] = cs.into_iter().filter(|p| seen.insert(p.clone())).collect();
        }
        Ok(MarginalSets { candidates })
    }

    pub fn at(&self, n: NodeId) -> &[Vec<Scalar>] {
        &self.candidates[n.0]
    }
}

/// All models obtained by choosing one candidate per node independently. The first
/// internal node varies slowest; ids are `r1, r2, ...` in that order.
pub fn rectangularize(tree: &ScenarioTree, marginals: &MarginalSets) -> Result<ModelFamily> {
    let internal: Vec<NodeId> = tree.internal_nodes().collect();
    for &n in &internal {
        if marginals.at(n).is_empty() {
            return Err(Error::InvalidModel(format!(
                "empty candidate set at node `{}`",
                tree.name(n)
            )));
        }
    }
    let mut models = Vec::new();
    let mut choice = vec![0usize; internal.len()];
    loop {
        let mut assignment = vec![None; tree.len()];
        for (k, &n) in internal.iter().enumerate() {
            assignment[n.0] = Some(marginals.at(n)[choice[k]].clone());
        }
        models.push(Model::from_assignment(format!("r{}", models.len() + 1), assignment));
        // odometer with the last node fastest
        let mut k = internal.len();
        loop {
            if k == 0 {
                return ModelFamily::new(tree, models);
            }
            k -= 1;
            choice[k] += 1;
            if choice[k] < marginals.at(internal[k]).len() {
                break;
            }
            choice[k] = 0;
        }
    }
}

/// Distinct transition vectors per node across the family, in first-seen order.
pub fn extract_marginals(tree: &ScenarioTree, family: &ModelFamily) -> MarginalSets {
    let mut candidates = vec![Vec::new(); tree.len()];
    for n in tree.internal_nodes() {
        let mut seen = BTreeSet::new();
        for m in family.models() {
            let p = m.transition(n).to_vec();
            if seen.insert(p.clone()) {
                candidates[n.0].push(p);
            }
        }
    }
    MarginalSets { candidates }
}

fn assignment_set(family: &ModelFamily) -> BTreeSet<Vec<Option<Vec<Scalar>>>> {
    family.models().iter().map(|m| m.assignment().to_vec()).collect()
}

/// True iff the family, as a set of transition assignments, equals the product of
/// its own node-wise marginals. The family always lies inside that product, so the
/// two sets are equal iff they have the same size.
pub fn is_m_rectangular(tree: &ScenarioTree, family: &ModelFamily) -> bool {
    let marginals = extract_marginals(tree, family);
    let distinct = assignment_set(family).len();
    let mut product = 1usize;
    for n in tree.internal_nodes() {
        product = product.saturating_mul(marginals.at(n).len());
        if product > distinct {
            return false;
        }
    }
    product == distinct
}

/// Same set of transition assignments, ignoring ids and order.
pub fn same_models(a: &ModelFamily, b: &ModelFamily) -> bool {
    assignment_set(a) == assignment_set(b)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RectEntry {
    pub vector: usize,
    pub time: usize,
    /// `vsup_θ E_t[vsup_θ E_{t+1}[X]]`
    pub nested: Option<AdaptedVector>,
    /// `vsup_θ E_t[X]`
    pub direct: Option<AdaptedVector>,
    /// nested ⪯ direct (the rectangularity inequality)
    pub forward: Option<bool>,
    /// direct ⪯ nested (always expected to hold)
    pub reverse: Option<bool>,
    /// nested = direct, reported for pointed cones
    pub equal: Option<bool>,
}

impl RectEntry {
    pub fn sup_missing(&self) -> bool {
        self.nested.is_none() || self.direct.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RectReport {
    pub entries: Vec<RectEntry>,
    pub vectors_checked: usize,
    pub seed: Option<u64>,
    pub pointed: bool,
}

impl RectReport {
    pub fn forward_counterexamples(&self) -> usize {
        self.entries.iter().filter(|e| e.forward == Some(false)).count()
    }

    pub fn reverse_failures(&self) -> usize {
        self.entries.iter().filter(|e| e.reverse == Some(false)).count()
    }

    pub fn missing_suprema(&self) -> usize {
        self.entries.iter().filter(|e| e.sup_missing()).count()
    }

    pub fn summary(&self) -> String {
        let n = self.vectors_checked;
        match self.forward_counterexamples() {
            0 => format!("no counterexample found among {n} vectors"),
            k => format!("{k} counterexample(s) found among {n} vectors"),
        }
    }
}

fn sup_of_expectations(
    method: &dyn SupremumMethod,
    cone: &Cone,
    tree: &ScenarioTree,
    family: &ModelFamily,
    x: &AdaptedVector,
    t: usize,
) -> Result<Option<AdaptedVector>> {
    let exps = family
        .models()
        .iter()
        .map(|m| cond_expect(tree, m, x, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(vsup_adapted(method, cone, tree, &exps)?.value().cloned())
}

/// Compares `vsup E_t[vsup E_{t+1}[X]]` with `vsup E_t[X]` for every test vector and
/// every `t` with `t + 1 < T`.
pub fn check_preorder_rectangularity(
    method: &dyn SupremumMethod,
    cone: &Cone,
    tree: &ScenarioTree,
    family: &ModelFamily,
    test_vectors: &[AdaptedVector],
) -> Result<RectReport> {
    let horizon = tree.horizon();
    let pointed = cone.is_pointed();
    let mut entries = Vec::new();
    for (k, x) in test_vectors.iter().enumerate() {
        if x.time != horizon {
            return Err(Error::InvalidProblem(format!(
                "test vector {k} is at time {}, expected {horizon}",
                x.time
            )));
        }
        for t in 0..horizon.saturating_sub(1) {
            let inner = sup_of_expectations(method, cone, tree, family, x, t + 1)?;
            let nested = match &inner {
                Some(v) => sup_of_expectations(method, cone, tree, family, v, t)?,
                None => None,
            };
            let direct = sup_of_expectations(method, cone, tree, family, x, t)?;
            let (forward, reverse, equal) = match (&nested, &direct) {
                (Some(n), Some(d)) => (
                    Some(leq_t(cone, n, d)?),
                    Some(leq_t(cone, d, n)?),
                    pointed.then(|| n == d),
                ),
                _ => (None, None, None),
            };
            entries.push(RectEntry {
                vector: k,
                time: t,
                nested,
                direct,
                forward,
                reverse,
                equal,
            });
        }
    }
    Ok(RectReport {
        entries,
        vectors_checked: test_vectors.len(),
        seed: None,
        pointed,
    })
}

/// A random rational on the grid `p/q`, `p ∈ -8..=8`, `q ∈ {1, 2, 4}`.
pub fn grid_scalar<R: Rng>(rng: &mut R) -> Scalar {
    let p = rng.gen_range(-8i64..=8);
    let q = [1i64, 2, 4][rng.gen_range(0..3)];
    ratio(p, q)
}

pub fn random_test_vectors(tree: &ScenarioTree, d: usize, n: usize, seed: u64) -> Vec<AdaptedVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let horizon = tree.horizon();
    (0..n)
        .map(|_| AdaptedVector {
            time: horizon,
            values: (0..tree.level(horizon).len())
                .map(|_| VecD((0..d).map(|_| grid_scalar(&mut rng)).collect()))
                .collect(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::{One, Signed};

    fn binomial_marginals(tree: &ScenarioTree, counts: &[usize]) -> MarginalSets {
        let pool = [ratio(1, 4), ratio(1, 2), ratio(3, 4)];
        let v = |p: &Scalar| vec![p.clone(), Scalar::one() - p];
        let nodes = ["root", "u", "d"];
        MarginalSets::new(
            tree,
            nodes.iter().zip(counts).map(|(name, &k)| {
                (tree.lookup(name).unwrap(), pool[..k].iter().map(v).collect())
            }),
        )
        .unwrap()
    }

    #[test]
    fn product_counts() {
        let t = ScenarioTree::binomial();
        assert_eq!(rectangularize(&t, &binomial_marginals(&t, &[1, 1, 1])).unwrap().len(), 1);
        assert_eq!(rectangularize(&t, &binomial_marginals(&t, &[2, 1, 3])).unwrap().len(), 6);
        let empty = binomial_marginals(&t, &[2, 0, 1]);
        assert!(rectangularize(&t, &empty).is_err());
    }

    #[test]
    fn hull_is_idempotent_and_rectangular() {
        let t = ScenarioTree::binomial();
        let fam = rectangularize(&t, &binomial_marginals(&t, &[2, 3, 2])).unwrap();
        assert!(is_m_rectangular(&t, &fam));
        let sub = fam.subset(&t, &["r1", "r12"]).unwrap();
        assert!(!is_m_rectangular(&t, &sub));
        let once = rectangularize(&t, &extract_marginals(&t, &sub)).unwrap();
        let twice = rectangularize(&t, &extract_marginals(&t, &once)).unwrap();
        assert!(same_models(&once, &twice));
        let single = fam.subset(&t, &["r5"]).unwrap();
        assert!(is_m_rectangular(&t, &single));
    }

    #[test]
    fn random_vectors_stay_on_grid() {
        let t = ScenarioTree::binomial();
        let xs = random_test_vectors(&t, 2, 20, 7);
        assert_eq!(xs, random_test_vectors(&t, 2, 20, 7));
        for x in &xs {
            for v in &x.values {
                for c in &v.0 {
                    assert!(c.denom() <= &num_bigint::BigInt::from(4));
                    assert!(c.abs() <= ratio(8, 1));
                }
            }
        }
    }
}
