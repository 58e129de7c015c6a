//! Seeded random problem instances with explicit dynamics and the component-wise cone.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cone::Cone;
use crate::dp::{ControlledProblem, Dynamics, ProblemMode, State};
use crate::rectangular::{grid_scalar, rectangularize, MarginalSets};
use crate::scalar::{ratio, Scalar, VecD};
use crate::stochastic::{Model, ModelFamily, NodeId, ScenarioTree};

/// Inclusive size ranges for generated instances.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomSpec {
    pub depth: (usize, usize),
    pub children: (usize, usize),
    pub controls: (usize, usize),
    pub states: (usize, usize),
    pub models: (usize, usize),
    pub dim: (usize, usize),
    /// Build the family by rectangularizing random marginal sets.
    pub rectangular: bool,
}

impl Default for RandomSpec {
    fn default() -> Self {
        RandomSpec {
            depth: (1, 3),
            children: (1, 3),
            controls: (1, 2),
            states: (1, 3),
            models: (1, 4),
            dim: (1, 3),
            rectangular: false,
        }
    }
}

impl RandomSpec {
    pub fn rectangular(mut self) -> Self {
        self.rectangular = true;
        self
    }

    /// One-dimensional losses under a single model.
    pub fn scalar() -> Self {
        RandomSpec {
            models: (1, 1),
            dim: (1, 1),
            ..RandomSpec::default()
        }
    }
}

fn pick<R: Rng>(rng: &mut R, (lo, hi): (usize, usize)) -> usize {
    rng.gen_range(lo..=hi)
}

/// Child `i` of every node carries branch label `i`.
fn random_tree<R: Rng>(rng: &mut R, spec: &RandomSpec) -> ScenarioTree {
    let depth = pick(rng, spec.depth).max(1);
    let mut children = Vec::new();
    let mut labels = HashMap::new();
    let mut level = vec!["r".to_string()];
    for _ in 0..depth {
        let mut next = Vec::new();
        for p in &level {
            let k = pick(rng, spec.children).max(1);
            let cs: Vec<String> = (0..k).map(|i| format!("{p}.{i}")).collect();
            for (i, c) in cs.iter().enumerate() {
                labels.insert(c.clone(), i.to_string());
            }
            next.extend(cs.iter().cloned());
            children.push((p.clone(), cs));
        }
        level = next;
    }
    ScenarioTree::build("r", &children, &labels).expect("generated trees are valid")
}

/// A probability vector with positive weights `w_i / Σ w`, `w_i ∈ 1..=4`.
fn random_distribution<R: Rng>(rng: &mut R, k: usize) -> Vec<Scalar> {
    let w: Vec<i64> = (0..k).map(|_| rng.gen_range(1..=4)).collect();
    let total: i64 = w.iter().sum();
    w.iter().map(|&x| ratio(x, total)).collect()
}

fn random_family<R: Rng>(rng: &mut R, tree: &ScenarioTree, spec: &RandomSpec) -> ModelFamily {
    let internal: Vec<NodeId> = tree.internal_nodes().collect();
    if spec.rectangular {
        let target = pick(rng, spec.models).max(1);
        let mut counts = vec![1usize; internal.len()];
        let mut product = 1;
        loop {
            let open: Vec<usize> = (0..internal.len())
                .filter(|&i| counts[i] == 1 && tree.children(internal[i]).len() > 1)
                .collect();
            if open.is_empty() || product * 2 > target {
                break;
            }
            counts[open[rng.gen_range(0..open.len())]] = 2;
            product *= 2;
        }
        let entries = internal.iter().zip(&counts).map(|(&n, &c)| {
            let k = tree.children(n).len();
            let mut cands: Vec<Vec<Scalar>> = Vec::new();
            while cands.len() < c {
                let p = random_distribution(rng, k);
                if !cands.contains(&p) {
                    cands.push(p);
                }
            }
            (n, cands)
        });
        let sets = MarginalSets::new(tree, entries.collect::<Vec<_>>()).expect("valid marginals");
        return rectangularize(tree, &sets).expect("valid marginals");
    }
    let m = pick(rng, spec.models).max(1);
    let models = (0..m)
        .map(|j| {
            let trans: Vec<(NodeId, Vec<Scalar>)> = internal
                .iter()
                .map(|&n| (n, random_distribution(rng, tree.children(n).len())))
                .collect();
            Model::new(tree, format!("m{}", j + 1), trans).expect("valid model")
        })
        .collect();
    ModelFamily::new(tree, models).expect("nonempty family")
}

fn state(t: usize, i: usize) -> State {
    State(format!("t{t}s{i}"))
}

fn random_dynamics<R: Rng>(rng: &mut R, tree: &ScenarioTree, spec: &RandomSpec, d: usize) -> Dynamics {
    let horizon = tree.horizon();
    let sizes: Vec<usize> = (0..=horizon)
        .map(|t| if t == 0 { 1 } else { pick(rng, spec.states).max(1) })
        .collect();
    let max_children = tree
        .node_ids()
        .map(|n| tree.children(n).len())
        .max()
        .unwrap_or(1);
    let controls = ["a", "b", "c", "d"];
    let mut dy = Dynamics {
        initial: state(0, 0),
        ..Dynamics::default()
    };
    for t in 0..horizon {
        for i in 0..sizes[t] {
            let k = pick(rng, spec.controls).clamp(1, controls.len());
            let cs: Vec<String> = controls[..k].iter().map(|c| c.to_string()).collect();
            for a in &cs {
                for label in 0..max_children {
                    let next = state(t + 1, rng.gen_range(0..sizes[t + 1]));
                    dy.transitions.insert((t, state(t, i), a.clone(), label.to_string()), next);
                }
            }
            dy.admissible.insert((t, state(t, i)), cs);
        }
    }
    for i in 0..sizes[horizon] {
        dy.loss
            .insert(state(horizon, i), VecD((0..d).map(|_| grid_scalar(rng)).collect()));
    }
    dy
}

/// A random instance determined by `seed`.
pub fn random_problem(seed: u64, spec: &RandomSpec) -> ControlledProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tree = random_tree(&mut rng, spec);
    let family = random_family(&mut rng, &tree, spec);
    let d = pick(&mut rng, spec.dim).max(1);
    let dynamics = random_dynamics(&mut rng, &tree, spec, d);
    ControlledProblem::new(
        format!("random-{seed}"),
        tree,
        family,
        Cone::componentwise(d),
        ProblemMode::Dynamics(dynamics),
    )
    .expect("generated problems are valid")
}
