//! Polyhedral ordering cones, the induced vector preorder and the two set relations.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg;
use crate::lp::{minimize_standard, Polyhedron};
use crate::scalar::{Scalar, VecD};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConeKind {
    ComponentWise,
    Halfspace(VecD),
    PolyhedralDual,
    PolyhedralGenerators,
}

/// A polyhedral convex cone in Q^d, given by generators `C = cone(G)`, by dual
/// generators `C = ∩ {x : ⟨b, x⟩ ≥ 0}`, or by both.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cone {
    dim: usize,
    kind: ConeKind,
    generators: Option<Vec<VecD>>,
    dual: Option<Vec<VecD>>,
}

fn check_all(vs: &[VecD], d: usize) -> Result<()> {
    vs.iter().try_for_each(|v| v.check_dim(d))
}

impl Cone {
    /// The nonnegative orthant R^d_+.
    pub fn componentwise(d: usize) -> Self {
        let basis: Vec<VecD> = (0..d).map(|i| VecD::unit(d, i)).collect();
        Cone {
            dim: d,
            kind: ConeKind::ComponentWise,
            generators: Some(basis.clone()),
            dual: Some(basis),
        }
    }

    /// `{x : ⟨w, x⟩ ≥ 0}` for nonzero `w`.
    pub fn halfspace(w: VecD) -> Result<Self> {
        if w.dim() == 0 {
            return Err(Error::Empty("halfspace normal"));
        }
        if w.is_zero() {
            return Err(Error::UnsupportedCone("halfspace normal must be nonzero".into()));
        }
        Ok(Cone {
            dim: w.dim(),
            kind: ConeKind::Halfspace(w.clone()),
            generators: None,
            dual: Some(vec![w]),
        })
    }

    pub fn from_dual(d: usize, dual: Vec<VecD>) -> Result<Self> {
        if d == 0 {
            return Err(Error::Empty("cone dimension"));
        }
        check_all(&dual, d)?;
        Ok(Cone {
            dim: d,
            kind: ConeKind::PolyhedralDual,
            generators: None,
            dual: Some(dual),
        })
    }

    pub fn from_generators(d: usize, generators: Vec<VecD>) -> Result<Self> {
        if d == 0 {
            return Err(Error::Empty("cone dimension"));
        }
        check_all(&generators, d)?;
        Ok(Cone {
            dim: d,
            kind: ConeKind::PolyhedralGenerators,
            generators: Some(generators),
            dual: None,
        })
    }

    /// Attaches a dual representation and checks it against the generators.
    pub fn with_dual(mut self, dual: Vec<VecD>) -> Result<Self> {
        check_all(&dual, self.dim)?;
        self.dual = Some(dual);
        self.check_consistency()?;
        Ok(self)
    }

    /// Attaches a generator representation and checks it against the dual.
    pub fn with_generators(mut self, generators: Vec<VecD>) -> Result<Self> {
        check_all(&generators, self.dim)?;
        self.generators = Some(generators);
        self.check_consistency()?;
        Ok(self)
    }

    /// Partial consistency check between the two representations: every generator
    /// satisfies every dual inequality and every dual inequality is tight on some generator.
    pub fn check_consistency(&self) -> Result<()> {
        let (Some(g), Some(b)) = (&self.generators, &self.dual) else {
            return Ok(());
        };
        for (i, bi) in b.iter().enumerate() {
            for (j, gj) in g.iter().enumerate() {
                if bi.dot(gj).is_negative() {
                    return Err(Error::InconsistentCone(format!(
                        "generator {j} violates dual inequality {i}"
                    )));
                }
            }
            if !g.is_empty() && !g.iter().any(|gj| bi.dot(gj).is_zero()) {
                return Err(Error::InconsistentCone(format!(
                    "dual inequality {i} is not tight on any generator"
                )));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &ConeKind {
        &self.kind
    }

    pub fn generators(&self) -> Option<&[VecD]> {
        self.generators.as_deref()
    }

    pub fn dual(&self) -> Option<&[VecD]> {
        self.dual.as_deref()
    }

    pub fn is_componentwise(&self) -> bool {
        self.kind == ConeKind::ComponentWise
    }

    pub fn contains(&self, x: &VecD) -> Result<bool> {
        x.check_dim(self.dim)?;
        if self.dual.is_some() {
            self.contains_via_dual(x)
        } else {
            self.contains_via_generators(x)
        }
    }

    pub fn contains_via_dual(&self, x: &VecD) -> Result<bool> {
        x.check_dim(self.dim)?;
        let b = self.dual.as_ref().ok_or(Error::MissingRepresentation("dual"))?;
        Ok(b.iter().all(|bi| !bi.dot(x).is_negative()))
    }

    /// Decides `x ∈ cone(G)` by phase-I feasibility of `G λ = x, λ ≥ 0`.
    pub fn contains_via_generators(&self, x: &VecD) -> Result<bool> {
        x.check_dim(self.dim)?;
        let g = self
            .generators
            .as_ref()
            .ok_or(Error::MissingRepresentation("generator"))?;
        if g.is_empty() {
            return Ok(x.is_zero());
        }
        let a: Vec<Vec<Scalar>> = (0..self.dim)
            .map(|i| g.iter().map(|gj| gj.0[i].clone()).collect())
            .collect();
        let c = vec![Scalar::zero(); g.len()];
        Ok(minimize_standard(&a, &x.0, &c).is_feasible())
    }

    /// `x ⪯_C y` iff `y − x ∈ C`.
    pub fn leq(&self, x: &VecD, y: &VecD) -> Result<bool> {
        x.check_dim(self.dim)?;
        y.check_dim(self.dim)?;
        self.contains(&(y - x))
    }

    /// `C ∩ (−C) = {0}`.
    pub fn is_pointed(&self) -> bool {
        if let Some(b) = &self.dual {
            // lineality space is the null space of the dual matrix
            return linalg::rank(b) == self.dim;
        }
        let g: Vec<&VecD> = self
            .generators
            .as_ref()
            .map(|g| g.iter().filter(|v| !v.is_zero()).collect())
            .unwrap_or_default();
        if g.is_empty() {
            return true;
        }
        // a nontrivial nonnegative combination of generators summing to zero
        let mut a: Vec<Vec<Scalar>> = (0..self.dim)
            .map(|i| g.iter().map(|gj| gj.0[i].clone()).collect())
            .collect();
        a.push(vec![Scalar::one(); g.len()]);
        let mut rhs = vec![Scalar::zero(); self.dim];
        rhs.push(Scalar::one());
        let c = vec![Scalar::zero(); g.len()];
        !minimize_standard(&a, &rhs, &c).is_feasible()
    }

    /// Non-empty interior.
    pub fn is_solid(&self) -> bool {
        if let Some(b) = &self.dual {
            if b.is_empty() {
                return true;
            }
            // ∃x: ⟨b_i, x⟩ ≥ 1 for all i (scale of a strictly feasible point)
            let p = Polyhedron::new(self.dim, b.clone(), vec![Scalar::one(); b.len()]);
            return !p.is_empty();
        }
        let g = self.generators.as_deref().unwrap_or(&[]);
        linalg::rank(g) == self.dim
    }

    /// `A ≼ B` iff `B ⊆ A + C`.
    pub fn set_precurly(&self, a: &[VecD], b: &[VecD]) -> Result<bool> {
        for bj in b {
            let mut covered = false;
            for ai in a {
                if self.leq(ai, bj)? {
                    covered = true;
                    break;
                }
            }
            if !covered {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `A ⋞ B` iff `A ⊆ B − C`.
    pub fn set_curlyprec(&self, a: &[VecD], b: &[VecD]) -> Result<bool> {
        for ai in a {
            let mut covered = false;
            for bj in b {
                if self.leq(ai, bj)? {
                    covered = true;
                    break;
                }
            }
            if !covered {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// First element of `b` that is not in `a + C`, if any.
    pub fn precurly_violation<'b>(&self, a: &[VecD], b: &'b [VecD]) -> Result<Option<&'b VecD>> {
        for bj in b {
            let mut covered = false;
            for ai in a {
                if self.leq(ai, bj)? {
                    covered = true;
                    break;
                }
            }
            if !covered {
                return Ok(Some(bj));
            }
        }
        Ok(None)
    }
}

/// The eight-generator octagonal cone in R³ for which suprema can fail to exist,
/// with its facet normals as the dual representation.
pub fn octagonal_cone() -> Cone {
    let q = |p: i64| crate::scalar::ratio(p, 4);
    let g: Vec<VecD> = [
        (4, 0),
        (0, 4),
        (-4, 0),
        (0, -4),
        (3, 3),
        (-3, 3),
        (-3, -3),
        (3, -3),
    ]
    .iter()
    .map(|&(a, b)| VecD(vec![q(a), q(b), Scalar::one()]))
    .collect();
    let b: Vec<VecD> = [
        (-3, -1),
        (-1, -3),
        (3, -1),
        (1, -3),
        (-3, 1),
        (-1, 3),
        (3, 1),
        (1, 3),
    ]
    .iter()
    .map(|&(x, y)| VecD::from_ints(&[x, y, 3]))
    .collect();
    Cone::from_generators(3, g)
        .and_then(|c| c.with_dual(b))
        .expect("octagonal cone representations agree")
}
