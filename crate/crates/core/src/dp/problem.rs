use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::cone::Cone;
use crate::error::{Error, Result};
use crate::scalar::VecD;
use crate::stochastic::{AdaptedVector, Model, ModelFamily, NodeId, ScenarioTree};
use crate::vsup::{default_method, SupremumMethod};

pub const DEFAULT_BUDGET: usize = 1_000_000;
pub const DEFAULT_FAMILY_LABEL: &str = "Theta";

pub type Control = String;

/// Controlled-state token. In tabulated problems it is the history of controls along
/// the observed path, joined by `>`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct State(pub String);

impl State {
    pub fn new(s: impl Into<String>) -> Self {
        State(s.into())
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            f.write_str("·")
        } else {
            f.write_str(&self.0)
        }
    }
}

/// The controlled dynamics `S_{t+1} = F(t, S_t, a, Z_{t+1})` with admissible controls
/// and terminal loss.
pub trait ControlSystem: fmt::Debug + Send + Sync {
    fn initial_state(&self) -> State;

    fn admissible(&self, tree: &ScenarioTree, t: usize, node: NodeId, state: &State) -> Result<Vec<Control>>;

    fn next_state(
        &self,
        tree: &ScenarioTree,
        t: usize,
        node: NodeId,
        state: &State,
        control: &str,
        child: NodeId,
    ) -> Result<State>;

    fn loss(&self, tree: &ScenarioTree, leaf: NodeId, state: &State) -> Result<VecD>;
}

/// Explicit finite dynamics. A transition keyed with branch label `*` matches any label.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Dynamics {
    pub initial: State,
    pub admissible: BTreeMap<(usize, State), Vec<Control>>,
    pub transitions: BTreeMap<(usize, State, Control, String), State>,
    pub loss: BTreeMap<State, VecD>,
}

pub const ANY_LABEL: &str = "*";

impl ControlSystem for Dynamics {
    fn initial_state(&self) -> State {
        self.initial.clone()
    }

    fn admissible(&self, _tree: &ScenarioTree, t: usize, _node: NodeId, state: &State) -> Result<Vec<Control>> {
        match self.admissible.get(&(t, state.clone())) {
            Some(cs) if !cs.is_empty() => Ok(cs.clone()),
            _ => Err(Error::InvalidProblem(format!(
                "empty control set at time {t} in state `{state}`"
            ))),
        }
    }

    fn next_state(
        &self,
        tree: &ScenarioTree,
        t: usize,
        _node: NodeId,
        state: &State,
        control: &str,
        child: NodeId,
    ) -> Result<State> {
        let label = tree.label(child).to_string();
        let key = (t, state.clone(), control.to_string(), label);
        if let Some(s) = self.transitions.get(&key) {
            return Ok(s.clone());
        }
        let wildcard = (t, state.clone(), control.to_string(), ANY_LABEL.to_string());
        self.transitions.get(&wildcard).cloned().ok_or_else(|| {
            Error::InvalidProblem(format!(
                "no transition for time {t}, state `{state}`, control `{control}`, branch `{}`",
                key.3
            ))
        })
    }

    fn loss(&self, _tree: &ScenarioTree, _leaf: NodeId, state: &State) -> Result<VecD> {
        self.loss
            .get(state)
            .cloned()
            .ok_or_else(|| Error::InvalidProblem(format!("no loss for terminal state `{state}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TabulatedStrategy {
    pub name: String,
    /// Control used at each non-terminal node; nodes not listed use the strategy name.
    pub controls: BTreeMap<NodeId, Control>,
    /// Terminal loss per leaf, in level order.
    pub loss: Vec<VecD>,
}

impl TabulatedStrategy {
    pub fn control_at(&self, n: NodeId) -> &str {
        self.controls.get(&n).map_or(self.name.as_str(), String::as_str)
    }
}

/// Strategies given only by their terminal loss tables. Intermediate admissible sets
/// are induced by strategy prefixes: at a node, the admissible controls are those of the
/// strategies whose controls agree with the history of the observed path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tabulated {
    pub strategies: Vec<TabulatedStrategy>,
}

const HISTORY_SEP: char = '>';

impl Tabulated {
    fn history(state: &State) -> Vec<&str> {
        if state.0.is_empty() {
            Vec::new()
        } else {
            state.0.split(HISTORY_SEP).collect()
        }
    }

    /// Strategies consistent with the control history `state` at `node`.
    pub fn consistent<'a>(
        &'a self,
        tree: &ScenarioTree,
        node: NodeId,
        state: &State,
    ) -> impl Iterator<Item = &'a TabulatedStrategy> + 'a {
        let ancestors = tree.ancestors(node);
        let hist: Vec<String> = Self::history(state).into_iter().map(str::to_string).collect();
        self.strategies.iter().filter(move |s| {
            ancestors.len() == hist.len()
                && ancestors.iter().zip(&hist).all(|(&a, h)| s.control_at(a) == h)
        })
    }
}

impl ControlSystem for Tabulated {
    fn initial_state(&self) -> State {
        State::new("")
    }

    fn admissible(&self, tree: &ScenarioTree, t: usize, node: NodeId, state: &State) -> Result<Vec<Control>> {
        let mut out: Vec<Control> = Vec::new();
        for s in self.consistent(tree, node, state) {
            let c = s.control_at(node);
            if !out.iter().any(|x| x == c) {
                out.push(c.to_string());
            }
        }
        if out.is_empty() {
            return Err(Error::InvalidProblem(format!(
                "empty control set at time {t}, node `{}`, history `{state}`",
                tree.name(node)
            )));
        }
        Ok(out)
    }

    fn next_state(
        &self,
        _tree: &ScenarioTree,
        _t: usize,
        _node: NodeId,
        state: &State,
        control: &str,
        _child: NodeId,
    ) -> Result<State> {
        Ok(if state.0.is_empty() {
            State::new(control)
        } else {
            State(format!("{}{HISTORY_SEP}{control}", state.0))
        })
    }

    fn loss(&self, tree: &ScenarioTree, leaf: NodeId, state: &State) -> Result<VecD> {
        let mut values = self
            .consistent(tree, leaf, state)
            .map(|s| &s.loss[tree.position(leaf)]);
        let first = values.next().ok_or_else(|| {
            Error::InvalidProblem(format!("no strategy reaches leaf `{}` with history `{state}`", tree.name(leaf)))
        })?;
        if values.any(|v| v != first) {
            return Err(Error::InvalidProblem(format!(
                "strategies with identical controls disagree at leaf `{}`",
                tree.name(leaf)
            )));
        }
        Ok(first.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProblemMode {
    Dynamics(Dynamics),
    Tabulated(Tabulated),
}

impl ProblemMode {
    pub fn system(&self) -> &dyn ControlSystem {
        match self {
            ProblemMode::Dynamics(d) => d,
            ProblemMode::Tabulated(t) => t,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EngineOptions {
    /// Maximum number of strategies or selector combinations enumerated per call.
    pub budget: usize,
    /// Prune dominated elements of the next-step sets inside the backward recursion.
    pub prune: bool,
    pub seed: Option<u64>,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions {
            budget: DEFAULT_BUDGET,
            prune: false,
            seed: None,
        }
    }
}

/// A robust control problem: tree, model family, ordering cone and controlled dynamics.
#[derive(Debug, Clone)]
pub struct ControlledProblem {
    pub name: String,
    pub tree: ScenarioTree,
    pub family: ModelFamily,
    /// Name of the family used in reports, e.g. `Theta`.
    pub family_label: String,
    pub cone: Cone,
    pub mode: ProblemMode,
    pub options: EngineOptions,
    pub sup: Arc<dyn SupremumMethod>,
}

impl PartialEq for ControlledProblem {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.family_label == other.family_label
            && self.tree == other.tree
            && self.family == other.family
            && self.cone == other.cone
            && self.mode == other.mode
            && self.options == other.options
            && self.sup.name() == other.sup.name()
    }
}

/// An adapted control rule from a start point: one control per reachable (node, state).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Strategy {
    pub name: String,
    pub start: (NodeId, State),
    pub choice: BTreeMap<(NodeId, State), Control>,
}

impl ControlledProblem {
    pub fn new(
        name: impl Into<String>,
        tree: ScenarioTree,
        family: ModelFamily,
        cone: Cone,
        mode: ProblemMode,
    ) -> Result<Self> {
        let p = ControlledProblem {
            name: name.into(),
            tree,
            family,
            family_label: DEFAULT_FAMILY_LABEL.to_string(),
            cone,
            mode,
            options: EngineOptions::default(),
            sup: default_method(),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_options(mut self, options: EngineOptions) -> Self {
        self.options = options;
        self
    }

    pub fn with_method(mut self, method: Arc<dyn SupremumMethod>) -> Self {
        self.sup = method;
        self
    }

    /// A copy of the problem under another model family, labelled `name`.
    pub fn with_family(&self, name: impl Into<String>, family: ModelFamily) -> Result<Self> {
        let mut p = self.clone();
        p.family_label = name.into();
        p.family = family;
        p.validate()?;
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.cone.dim()
    }

    pub fn horizon(&self) -> usize {
        self.tree.horizon()
    }

    pub fn system(&self) -> &dyn ControlSystem {
        self.mode.system()
    }

    pub fn models(&self) -> &[Model] {
        self.family.models()
    }

    /// Checks totality of dynamics and loss on everything reachable, and loss dimensions.
    pub fn validate(&self) -> Result<()> {
        for m in self.family.models() {
            m.validate(&self.tree)?;
        }
        if let ProblemMode::Tabulated(tab) = &self.mode {
            if tab.strategies.is_empty() {
                return Err(Error::InvalidProblem("no strategies given".into()));
            }
            let leaves = self.tree.level(self.horizon()).len();
            for s in &tab.strategies {
                if s.loss.len() != leaves {
                    return Err(Error::InvalidProblem(format!(
                        "strategy `{}` defines {} leaf values, tree has {leaves} leaves",
                        s.name,
                        s.loss.len()
                    )));
                }
                if s.name.contains(HISTORY_SEP) || s.controls.values().any(|c| c.contains(HISTORY_SEP)) {
                    return Err(Error::InvalidProblem(format!(
                        "strategy `{}`: control names may not contain `{HISTORY_SEP}`",
                        s.name
                    )));
                }
            }
        }
        let levels = self.reachable()?;
        let d = self.dim();
        for (leaf, s) in &levels[self.horizon()] {
            self.system().loss(&self.tree, *leaf, s)?.check_dim(d)?;
        }
        Ok(())
    }

    /// Reachable (node, state) pairs per time, in level order then discovery order.
    pub fn reachable(&self) -> Result<Vec<Vec<(NodeId, State)>>> {
        let sys = self.system();
        let horizon = self.horizon();
        let mut levels: Vec<Vec<(NodeId, State)>> = vec![vec![(self.tree.root(), sys.initial_state())]];
        for t in 0..horizon {
            let mut per_node: HashMap<NodeId, Vec<State>> = HashMap::new();
            for (n, s) in &levels[t] {
                for a in sys.admissible(&self.tree, t, *n, s)? {
                    for &c in self.tree.children(*n) {
                        let next = sys.next_state(&self.tree, t, *n, s, &a, c)?;
                        let entry = per_node.entry(c).or_default();
                        if !entry.contains(&next) {
                            entry.push(next);
                        }
                    }
                }
            }
            let mut level = Vec::new();
            for &c in self.tree.level(t + 1) {
                for s in per_node.remove(&c).unwrap_or_default() {
                    level.push((c, s));
                }
            }
            levels.push(level);
        }
        Ok(levels)
    }

    fn count_strategies(
        &self,
        t: usize,
        node: NodeId,
        state: &State,
        memo: &mut HashMap<(NodeId, State), usize>,
    ) -> Result<usize> {
        if self.tree.is_leaf(node) {
            return Ok(1);
        }
        if let Some(&k) = memo.get(&(node, state.clone())) {
            return Ok(k);
        }
        let sys = self.system();
        let mut total = 0usize;
        for a in sys.admissible(&self.tree, t, node, state)? {
            let mut prod = 1usize;
            for &c in self.tree.children(node) {
                let s = sys.next_state(&self.tree, t, node, state, &a, c)?;
                prod = prod.saturating_mul(self.count_strategies(t + 1, c, &s, memo)?);
            }
            total = total.saturating_add(prod);
        }
        memo.insert((node, state.clone()), total);
        Ok(total)
    }

    fn check_node_time(&self, t: usize, node: NodeId) -> Result<()> {
        if t > self.horizon() {
            return Err(Error::TimeOutOfRange {
                time: t,
                horizon: self.horizon(),
            });
        }
        if self.tree.time(node) != t {
            return Err(Error::InvalidProblem(format!(
                "node `{}` is not at time {t}",
                self.tree.name(node)
            )));
        }
        Ok(())
    }

    /// All admissible strategies from `(node, state)` at time `t`, in deterministic order:
    /// controls in admissible order, then child sub-strategies with the first child
    /// varying slowest. Tabulated problems return the named strategies consistent with
    /// the history.
    pub fn enumerate_strategies(&self, t: usize, node: NodeId, state: &State) -> Result<Vec<Strategy>> {
        self.check_node_time(t, node)?;
        match &self.mode {
            ProblemMode::Tabulated(tab) => {
                let out: Vec<Strategy> = tab
                    .consistent(&self.tree, node, state)
                    .map(|s| {
                        let mut choice = BTreeMap::new();
                        self.fill_tabulated(s, node, state.clone(), &mut choice);
                        Strategy {
                            name: s.name.clone(),
                            start: (node, state.clone()),
                            choice,
                        }
                    })
                    .collect();
                if out.len() > self.options.budget {
                    return Err(Error::DeskScaleExceeded {
                        what: "strategies",
                        actual: out.len(),
                        limit: self.options.budget,
                    });
                }
                Ok(out)
            }
            ProblemMode::Dynamics(_) => {
                let count = self.count_strategies(t, node, state, &mut HashMap::new())?;
                if count > self.options.budget {
                    return Err(Error::DeskScaleExceeded {
                        what: "strategies",
                        actual: count,
                        limit: self.options.budget,
                    });
                }
                let choices = self.strategy_choices(t, node, state)?;
                Ok(choices
                    .into_iter()
                    .enumerate()
                    .map(|(k, choice)| Strategy {
                        name: format!("#{}", k + 1),
                        start: (node, state.clone()),
                        choice,
                    })
                    .collect())
            }
        }
    }

    fn fill_tabulated(
        &self,
        s: &TabulatedStrategy,
        node: NodeId,
        state: State,
        choice: &mut BTreeMap<(NodeId, State), Control>,
    ) {
        if self.tree.is_leaf(node) {
            return;
        }
        let a = s.control_at(node).to_string();
        let t = self.tree.time(node);
        for &c in self.tree.children(node) {
            let next = self
                .system()
                .next_state(&self.tree, t, node, &state, &a, c)
                .expect("tabulated transitions are total");
            self.fill_tabulated(s, c, next, choice);
        }
        choice.insert((node, state), a);
    }

    fn strategy_choices(
        &self,
        t: usize,
        node: NodeId,
        state: &State,
    ) -> Result<Vec<BTreeMap<(NodeId, State), Control>>> {
        if self.tree.is_leaf(node) {
            return Ok(vec![BTreeMap::new()]);
        }
        let sys = self.system();
        let mut out = Vec::new();
        for a in sys.admissible(&self.tree, t, node, state)? {
            let mut partial: Vec<BTreeMap<(NodeId, State), Control>> = vec![BTreeMap::new()];
            for &c in self.tree.children(node) {
                let s = sys.next_state(&self.tree, t, node, state, &a, c)?;
                let subs = self.strategy_choices(t + 1, c, &s)?;
                let mut next = Vec::with_capacity(partial.len() * subs.len());
                for p in &partial {
                    for sub in &subs {
                        let mut m = p.clone();
                        m.extend(sub.iter().map(|(k, v)| (k.clone(), v.clone())));
                        next.push(m);
                    }
                }
                partial = next;
            }
            for mut p in partial {
                p.insert((node, state.clone()), a.clone());
                out.push(p);
            }
        }
        Ok(out)
    }

    /// `E^θ[ℓ(S_T) | node]` under `strategy`, starting from `(node, state)`.
    pub fn strategy_expectation(
        &self,
        model: &Model,
        strategy: &Strategy,
        node: NodeId,
        state: &State,
    ) -> Result<VecD> {
        let sys = self.system();
        if self.tree.is_leaf(node) {
            return sys.loss(&self.tree, node, state);
        }
        let t = self.tree.time(node);
        let a = strategy.choice.get(&(node, state.clone())).ok_or_else(|| {
            Error::InvalidProblem(format!(
                "strategy `{}` has no control at node `{}` in state `{state}`",
                strategy.name,
                self.tree.name(node)
            ))
        })?;
        let mut acc = VecD::zeros(self.dim());
        for (i, &c) in self.tree.children(node).iter().enumerate() {
            let s = sys.next_state(&self.tree, t, node, state, a, c)?;
            let v = self.strategy_expectation(model, strategy, c, &s)?;
            acc.add_scaled(model.prob(node, i), &v);
        }
        Ok(acc)
    }

    /// `ℓ(S^φ_T)` on every leaf for a strategy that starts at the root.
    pub fn terminal_loss(&self, strategy: &Strategy) -> Result<AdaptedVector> {
        if strategy.start.0 != self.tree.root() {
            return Err(Error::InvalidProblem(format!(
                "strategy `{}` does not start at the root",
                strategy.name
            )));
        }
        let horizon = self.horizon();
        let mut values = vec![VecD::zeros(self.dim()); self.tree.level(horizon).len()];
        let mut stack = vec![strategy.start.clone()];
        let sys = self.system();
        while let Some((n, s)) = stack.pop() {
            if self.tree.is_leaf(n) {
                values[self.tree.position(n)] = sys.loss(&self.tree, n, &s)?;
                continue;
            }
            let a = strategy.choice.get(&(n, s.clone())).ok_or_else(|| {
                Error::InvalidProblem(format!(
                    "strategy `{}` has no control at node `{}`",
                    strategy.name,
                    self.tree.name(n)
                ))
            })?;
            for &c in self.tree.children(n) {
                stack.push((c, sys.next_state(&self.tree, self.tree.time(n), n, &s, a, c)?));
            }
        }
        AdaptedVector::new(&self.tree, horizon, values)
    }
}
