//! Strategies, value sets and the Bellman relations between them.

mod bellman;
mod engine;
mod problem;

pub use bellman::{
    pareto_minimal, prune_pareto, BellmanReport, Relation, RelationCheck, RelationClass, UpperImageFailure,
    UpperImageReport, Witness,
};
pub use engine::{LocalValues, Provenance, ValueSet};
pub use problem::{
    Control, ControlSystem, ControlledProblem, Dynamics, EngineOptions, ProblemMode, State, Strategy, Tabulated,
    TabulatedStrategy, ANY_LABEL, DEFAULT_BUDGET, DEFAULT_FAMILY_LABEL,
};
