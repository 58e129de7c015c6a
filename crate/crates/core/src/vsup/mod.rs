//! Ideal-point suprema of finite collections of vectors under a cone preorder.
//!
//! Each algorithm implements [`SupremumMethod`] and is registered by name in a
//! [`SupRegistry`]; callers select one at runtime (`auto` dispatches on the cone).

mod componentwise;
mod dual_li;
mod general;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::cone::{Cone, ConeKind};
use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::VecD;

pub use componentwise::{vsup_componentwise, ComponentWiseSup};
pub use dual_li::{vsup_dual_li, DualLiSup};
pub use general::{vsup_general, GeneralSup, MAX_VERTEX_DIM, MAX_VERTEX_INEQUALITIES};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SupStatus {
    Unique(VecD),
    NonUniqueWitness(VecD),
    NotExists,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate {
    /// Another supremum, distinct from the returned one.
    SecondSupremum(VecD),
    /// The intersection of the shifted cones is empty: no upper bound exists.
    EmptyIntersection,
    /// `point` is an upper bound of the collection that does not dominate `candidate`,
    /// a minimal upper bound. `vertices` lists the vertices of the upper-bound polyhedron
    /// when it has any.
    Undominated {
        candidate: VecD,
        point: VecD,
        vertices: Vec<VecD>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupResult {
    pub status: SupStatus,
    pub certificate: Option<Certificate>,
}

impl SupResult {
    pub fn unique(v: VecD) -> Self {
        SupResult {
            status: SupStatus::Unique(v),
            certificate: None,
        }
    }

    pub fn non_unique(v: VecD, other: VecD) -> Self {
        SupResult {
            status: SupStatus::NonUniqueWitness(v),
            certificate: Some(Certificate::SecondSupremum(other)),
        }
    }

    /// The selected supremum, if one exists.
    pub fn value(&self) -> Option<&VecD> {
        match &self.status {
            SupStatus::Unique(v) | SupStatus::NonUniqueWitness(v) => Some(v),
            SupStatus::NotExists => None,
        }
    }

    pub fn exists(&self) -> bool {
        self.value().is_some()
    }
}

impl fmt::Display for SupResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.status {
            SupStatus::Unique(v) => writeln!(f, "status: unique\nsupremum: {v}")?,
            SupStatus::NonUniqueWitness(v) => writeln!(f, "status: non-unique\nsupremum: {v}")?,
            SupStatus::NotExists => writeln!(f, "status: not-exists")?,
        }
        match &self.certificate {
            None => {}
            Some(Certificate::SecondSupremum(w)) => writeln!(f, "second supremum: {w}")?,
            Some(Certificate::EmptyIntersection) => {
                writeln!(f, "certificate: upper-bound set is empty")?
            }
            Some(Certificate::Undominated {
                candidate,
                point,
                vertices,
            }) => {
                writeln!(f, "candidate: {candidate}")?;
                writeln!(f, "undominated upper bound: {point}")?;
                if !vertices.is_empty() {
                    writeln!(f, "upper-bound vertices: {}", crate::scalar::format_set(vertices))?;
                }
            }
        }
        Ok(())
    }
}

/// One algorithm for computing suprema.
pub trait SupremumMethod: Send + Sync + fmt::Debug {
    fn name(&self) -> &'static str;

    /// Whether this method can run on `cone` at all.
    fn supports(&self, cone: &Cone) -> bool;

    fn supremum(&self, cone: &Cone, xs: &[VecD]) -> Result<SupResult>;
}

pub(crate) fn check_points(cone: &Cone, xs: &[VecD]) -> Result<()> {
    if xs.is_empty() {
        return Err(Error::Empty("supremum of an empty collection"));
    }
    xs.iter().try_for_each(|x| x.check_dim(cone.dim()))
}

/// Dispatches on the cone: component-wise fast path, then the linearly independent
/// dual construction, then the general polyhedral procedure.
#[derive(Debug, Default, Clone, Copy)]
pub struct AutoSup;

impl SupremumMethod for AutoSup {
    fn name(&self) -> &'static str {
        "auto"
    }

    fn supports(&self, cone: &Cone) -> bool {
        cone.is_componentwise() || cone.dual().is_some()
    }

    fn supremum(&self, cone: &Cone, xs: &[VecD]) -> Result<SupResult> {
        vsup(cone, xs)
    }
}

pub fn vsup(cone: &Cone, xs: &[VecD]) -> Result<SupResult> {
    check_points(cone, xs)?;
    if *cone.kind() == ConeKind::ComponentWise {
        return vsup_componentwise(xs).map(SupResult::unique);
    }
    let dual = cone.dual().ok_or(Error::MissingRepresentation("dual"))?;
    if !dual.is_empty() && linalg::rank(dual) == dual.len() {
        vsup_dual_li(cone, xs)
    } else {
        vsup_general(cone, xs)
    }
}

/// Named collection of supremum methods.
#[derive(Debug, Clone)]
pub struct SupRegistry {
    methods: BTreeMap<&'static str, Arc<dyn SupremumMethod>>,
}

impl SupRegistry {
    pub fn empty() -> Self {
        SupRegistry {
            methods: BTreeMap::new(),
        }
    }

    pub fn register(&mut self, method: Arc<dyn SupremumMethod>) {
        self.methods.insert(method.name(), method);
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn SupremumMethod>> {
        self.methods
            .get(name)
            .cloned()
            .ok_or_else(|| Error::UnknownMethod(name.to_string()))
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.methods.keys().copied().collect()
    }
}

impl Default for SupRegistry {
    fn default() -> Self {
        let mut r = SupRegistry::empty();
        r.register(Arc::new(AutoSup));
        r.register(Arc::new(ComponentWiseSup));
        r.register(Arc::new(DualLiSup));
        r.register(Arc::new(GeneralSup::default()));
        r
    }
}

pub fn default_method() -> Arc<dyn SupremumMethod> {
    Arc::new(AutoSup)
}
