use std::collections::{HashMap, HashSet};
use std::fmt;
use std::rc::Rc;

use crate::error::{Error, Result};
use crate::scalar::{format_set, VecD};
use crate::stochastic::NodeId;
use crate::vsup::SupStatus;

use super::bellman::pareto_minimal;
use super::problem::{Control, ControlledProblem, ProblemMode, State};

/// Where an element of a value set comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    Terminal,
    Strategy(String),
    /// Control at the node and, per child, the index of the element picked from the
    /// next-step set.
    Selector { control: Control, picks: Vec<usize> },
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Terminal => f.write_str("terminal"),
            Provenance::Strategy(s) => write!(f, "strategy {s}"),
            Provenance::Selector { control, picks } => {
                let p: Vec<String> = picks.iter().map(ToString::to_string).collect();
                write!(f, "control {control}, picks [{}]", p.join(","))
            }
        }
    }
}

/// Value set at one (node, state).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalValues {
    pub node: NodeId,
    pub state: State,
    pub elements: Vec<VecD>,
    pub provenance: Vec<Provenance>,
    /// Some supremum behind an element was non-unique and a witness was used.
    pub non_unique: bool,
}

struct LocalBuilder {
    values: LocalValues,
    seen: HashSet<VecD>,
}

impl LocalBuilder {
    fn new(node: NodeId, state: &State) -> Self {
        LocalBuilder {
            values: LocalValues {
                node,
                state: state.clone(),
                elements: Vec::new(),
                provenance: Vec::new(),
                non_unique: false,
            },
            seen: HashSet::new(),
        }
    }

    fn push(&mut self, v: VecD, p: Provenance, non_unique: bool) {
        self.values.non_unique |= non_unique;
        if self.seen.insert(v.clone()) {
            self.values.elements.push(v);
            self.values.provenance.push(p);
        }
    }

    fn finish(self) -> LocalValues {
        self.values
    }
}

/// A set of adapted vectors at time `t`, stored node by node. The adapted set is the
/// product of the local sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValueSet {
    pub time: usize,
    pub locals: Vec<LocalValues>,
}

impl ValueSet {
    pub fn get(&self, node: NodeId, state: &State) -> Option<&LocalValues> {
        self.locals.iter().find(|l| l.node == node && &l.state == state)
    }

    pub fn elements(&self, node: NodeId, state: &State) -> Result<&[VecD]> {
        self.get(node, state)
            .map(|l| l.elements.as_slice())
            .ok_or_else(|| Error::InvalidProblem(format!("no value set for state `{state}`")))
    }

    /// The local set at the first time-`t` entry; at `t = 0` this is the root set.
    pub fn first(&self) -> &LocalValues {
        &self.locals[0]
    }

    pub fn non_unique(&self) -> bool {
        self.locals.iter().any(|l| l.non_unique)
    }
}

impl fmt::Display for ValueSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.locals.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{}|{} {}", l.node.0, l.state, format_set(&l.elements))?;
        }
        Ok(())
    }
}

type Profiles = Rc<Vec<Vec<VecD>>>;

impl ControlledProblem {
    fn sup_of(&self, node: NodeId, xs: &[VecD], context: impl FnOnce() -> String) -> Result<(VecD, bool)> {
        let r = self.sup.supremum(&self.cone, xs)?;
        match r.status {
            SupStatus::Unique(v) => Ok((v, false)),
            SupStatus::NonUniqueWitness(v) => Ok((v, true)),
            SupStatus::NotExists => Err(Error::SupNotExists {
                node: self.tree.name(node).to_string(),
                context: context(),
            }),
        }
    }

    fn check_time(&self, t: usize) -> Result<()> {
        if t > self.horizon() {
            return Err(Error::TimeOutOfRange {
                time: t,
                horizon: self.horizon(),
            });
        }
        Ok(())
    }

    fn terminal_set(&self, reachable: &[(NodeId, State)]) -> Result<ValueSet> {
        let mut locals = Vec::with_capacity(reachable.len());
        for (n, s) in reachable {
            let mut l = LocalBuilder::new(*n, s);
            l.push(self.system().loss(&self.tree, *n, s)?, Provenance::Terminal, false);
            locals.push(l.finish());
        }
        Ok(ValueSet {
            time: self.horizon(),
            locals,
        })
    }

    /// Per-strategy vectors of model-wise conditional expectations at `(node, state)`,
    /// in strategy enumeration order.
    fn profiles(&self, node: NodeId, state: &State, memo: &mut HashMap<(NodeId, State), Profiles>) -> Result<Profiles> {
        if let Some(p) = memo.get(&(node, state.clone())) {
            return Ok(p.clone());
        }
        let sys = self.system();
        let models = self.models();
        let out: Profiles = if self.tree.is_leaf(node) {
            let l = sys.loss(&self.tree, node, state)?;
            Rc::new(vec![vec![l; models.len()]])
        } else {
            let t = self.tree.time(node);
            let mut out = Vec::new();
            for a in sys.admissible(&self.tree, t, node, state)? {
                let mut subs = Vec::new();
                for &c in self.tree.children(node) {
                    let s = sys.next_state(&self.tree, t, node, state, &a, c)?;
                    subs.push(self.profiles(c, &s, memo)?);
                }
                let total = subs.iter().map(|s| s.len()).product::<usize>();
                if out.len() + total > self.options.budget {
                    return Err(Error::DeskScaleExceeded {
                        what: "strategies",
                        actual: out.len() + total,
                        limit: self.options.budget,
                    });
                }
                let mut idx = vec![0usize; subs.len()];
                for _ in 0..total {
                    let per_model = models
                        .iter()
                        .enumerate()
                        .map(|(k, m)| {
                            let mut acc = VecD::zeros(self.dim());
                            for (i, sub) in subs.iter().enumerate() {
                                acc.add_scaled(m.prob(node, i), &sub[idx[i]][k]);
                            }
                            acc
                        })
                        .collect();
                    out.push(per_model);
                    advance(&mut idx, subs.iter().map(|s| s.len()));
                }
            }
            Rc::new(out)
        };
        memo.insert((node, state.clone()), out.clone());
        Ok(out)
    }

    fn value_set_at(
        &self,
        t: usize,
        reachable: &[(NodeId, State)],
        memo: &mut HashMap<(NodeId, State), Profiles>,
    ) -> Result<ValueSet> {
        if t == self.horizon() {
            return self.terminal_set(reachable);
        }
        let mut locals = Vec::with_capacity(reachable.len());
        for (n, s) in reachable {
            let mut l = LocalBuilder::new(*n, s);
            let named: Vec<(String, Vec<VecD>)> = match &self.mode {
                ProblemMode::Tabulated(_) => {
                    let mut v = Vec::new();
                    for st in self.enumerate_strategies(t, *n, s)? {
                        let per_model = self
                            .models()
                            .iter()
                            .map(|m| self.strategy_expectation(m, &st, *n, s))
                            .collect::<Result<Vec<_>>>()?;
                        v.push((st.name, per_model));
                    }
                    v
                }
                ProblemMode::Dynamics(_) => self
                    .profiles(*n, s, memo)?
                    .iter()
                    .enumerate()
                    .map(|(k, p)| (format!("#{}", k + 1), p.clone()))
                    .collect(),
            };
            for (name, per_model) in named {
                let (v, nu) = self.sup_of(*n, &per_model, || format!(" (strategy {name})"))?;
                l.push(v, Provenance::Strategy(name), nu);
            }
            locals.push(l.finish());
        }
        Ok(ValueSet { time: t, locals })
    }

    /// `𝒱_t`: suprema over models of the conditional expected terminal loss, one element
    /// per admissible strategy from each reachable time-`t` (node, state).
    pub fn value_function(&self, t: usize) -> Result<ValueSet> {
        self.check_time(t)?;
        let reachable = self.reachable()?;
        self.value_set_at(t, &reachable[t], &mut HashMap::new())
    }

    /// `𝒱_0, …, 𝒱_T`.
    pub fn value_functions(&self) -> Result<Vec<ValueSet>> {
        let reachable = self.reachable()?;
        let mut memo = HashMap::new();
        (0..=self.horizon())
            .map(|t| self.value_set_at(t, &reachable[t], &mut memo))
            .collect()
    }

    /// One selector step: for every reachable time-`t` (node, state) and admissible
    /// control, every choice of one element per child from `next`, mapped through the
    /// supremum over models of the one-step conditional expectation.
    pub fn selector_step(&self, t: usize, next: &ValueSet, prune: bool) -> Result<ValueSet> {
        if t >= self.horizon() {
            return Err(Error::TimeOutOfRange {
                time: t,
                horizon: self.horizon().saturating_sub(1),
            });
        }
        if next.time != t + 1 {
            return Err(Error::InvalidProblem(format!(
                "selector step at time {t} needs a time-{} set",
                t + 1
            )));
        }
        let reachable = self.reachable()?;
        let sys = self.system();
        let models = self.models();
        let mut combos = 0usize;
        let mut locals = Vec::with_capacity(reachable[t].len());
        for (n, s) in &reachable[t] {
            let mut l = LocalBuilder::new(*n, s);
            for a in sys.admissible(&self.tree, t, *n, s)? {
                let mut sets: Vec<(Vec<usize>, &[VecD])> = Vec::new();
                for &c in self.tree.children(*n) {
                    let cs = sys.next_state(&self.tree, t, *n, s, &a, c)?;
                    let elems = next.elements(c, &cs)?;
                    let keep = if prune {
                        pareto_minimal(&self.cone, elems)?
                    } else {
                        (0..elems.len()).collect()
                    };
                    sets.push((keep, elems));
                }
                let total = sets.iter().map(|(k, _)| k.len()).product::<usize>();
                combos = combos.saturating_add(total);
                if combos > self.options.budget {
                    return Err(Error::DeskScaleExceeded {
                        what: "selector combinations",
                        actual: combos,
                        limit: self.options.budget,
                    });
                }
                let mut idx = vec![0usize; sets.len()];
                for _ in 0..total {
                    let picks: Vec<usize> = sets.iter().zip(&idx).map(|((k, _), &i)| k[i]).collect();
                    let per_model: Vec<VecD> = models
                        .iter()
                        .map(|m| {
                            let mut acc = VecD::zeros(self.dim());
                            for (i, (_, elems)) in sets.iter().enumerate() {
                                acc.add_scaled(m.prob(*n, i), &elems[picks[i]]);
                            }
                            acc
                        })
                        .collect();
                    let (v, nu) = self.sup_of(*n, &per_model, || format!(" (control {a})"))?;
                    l.push(v, Provenance::Selector { control: a.clone(), picks }, nu);
                    advance(&mut idx, sets.iter().map(|(k, _)| k.len()));
                }
            }
            locals.push(l.finish());
        }
        Ok(ValueSet { time: t, locals })
    }

    /// `𝓡_t(𝒱_{t+1})`: one selector step applied to the true time-`t+1` value sets.
    pub fn one_step(&self, t: usize, v_next: &ValueSet) -> Result<ValueSet> {
        self.selector_step(t, v_next, false)
    }

    /// `𝓑_0, …, 𝓑_T` from the backward recursion, honouring the prune option.
    pub fn backward_value(&self) -> Result<Vec<ValueSet>> {
        let reachable = self.reachable()?;
        let horizon = self.horizon();
        let mut out = vec![self.terminal_set(&reachable[horizon])?];
        for t in (0..horizon).rev() {
            let b = self.selector_step(t, &out[0], self.options.prune)?;
            out.insert(0, b);
        }
        Ok(out)
    }
}

/// Odometer increment with the first position varying slowest.
fn advance(idx: &mut [usize], lens: impl Iterator<Item = usize>) {
    let lens: Vec<usize> = lens.collect();
    for i in (0..idx.len()).rev() {
        idx[i] += 1;
        if idx[i] < lens[i] {
            return;
        }
        idx[i] = 0;
    }
}
