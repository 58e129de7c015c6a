//! Robust set-valued dynamic programming on finite scenario trees with vector losses.
//!
//! Values are exact rationals. The ordering cone is polyhedral, given by generators,
//! by dual inequalities or both; the component-wise order has fast paths throughout.

pub mod cone;
pub mod dp;
pub mod error;
pub mod io;
pub mod linalg;
pub mod lp;
pub mod random;
pub mod rectangular;
pub mod scalar;
pub mod stochastic;
pub mod vsup;

pub use cone::{Cone, ConeKind};
pub use dp::{ControlledProblem, ValueSet};
pub use error::{Error, Result};
pub use scalar::{Scalar, VecD};
pub use stochastic::{AdaptedVector, Model, ModelFamily, NodeId, ScenarioTree};
pub use vsup::{vsup, SupRegistry, SupResult, SupStatus, SupremumMethod};
