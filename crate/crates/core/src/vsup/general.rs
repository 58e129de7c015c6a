use crate::cone::Cone;
use crate::error::{Error, Result};
use crate::linalg;
use crate::lp::{PolyMin, Polyhedron};
use crate::scalar::{Scalar, VecD};

use super::{check_points, Certificate, SupResult, SupStatus, SupremumMethod};

pub const MAX_VERTEX_DIM: usize = 4;
pub const MAX_VERTEX_INEQUALITIES: usize = 16;

/// Exact supremum for any cone with a dual representation (dual generators may be
/// dependent or redundant).
///
/// The set of upper bounds is `P = {x : ⟨b_i, x⟩ ≥ α_i}` with `α_i = max_θ ⟨b_i, x^θ⟩`.
/// A supremum exists iff `P = V + C` for some `V`, which holds iff the system
/// `⟨b_i, V⟩ = β_i` is solvable, where `β_i = min_{x ∈ P} ⟨b_i, x⟩`. When it is not,
/// a minimal element of `P` is returned as candidate together with a vertex of `P`
/// outside `candidate + C`.
pub fn vsup_general(cone: &Cone, xs: &[VecD]) -> Result<SupResult> {
    vsup_general_with_limits(cone, xs, MAX_VERTEX_DIM, MAX_VERTEX_INEQUALITIES)
}

fn vsup_general_with_limits(
    cone: &Cone,
    xs: &[VecD],
    max_dim: usize,
    max_ineq: usize,
) -> Result<SupResult> {
    check_points(cone, xs)?;
    let b = cone
        .dual()
        .ok_or_else(|| Error::UnsupportedCone("general supremum needs a dual representation".into()))?;
    let d = cone.dim();
    if d > max_dim {
        return Err(Error::DeskScaleExceeded {
            what: "dimension",
            actual: d,
            limit: max_dim,
        });
    }
    if b.len() > max_ineq {
        return Err(Error::DeskScaleExceeded {
            what: "dual inequalities",
            actual: b.len(),
            limit: max_ineq,
        });
    }
    if b.is_empty() {
        // C = Q^d: every point is an upper bound and all are mutually dominating.
        let v = VecD::zeros(d);
        let other = VecD::unit(d, 0);
        return Ok(SupResult::non_unique(v, other));
    }

    let alpha: Vec<Scalar> = b
        .iter()
        .map(|bi| xs.iter().map(|x| bi.dot(x)).max().expect("nonempty"))
        .collect();
    let upper = Polyhedron::new(d, b.to_vec(), alpha);

    let mut beta = Vec::with_capacity(b.len());
    let mut argmins = Vec::with_capacity(b.len());
    for bi in b {
        match upper.minimize(bi) {
            PolyMin::Optimal { point, value } => {
                beta.push(value);
                argmins.push(point);
            }
            PolyMin::Infeasible => {
                return Ok(SupResult {
                    status: SupStatus::NotExists,
                    certificate: Some(Certificate::EmptyIntersection),
                })
            }
            PolyMin::Unbounded => unreachable!("⟨b_i, x⟩ ≥ α_i bounds the objective"),
        }
    }

    let full_rank = linalg::rank(b) == d;
    if let Some(v) = linalg::solve_canonical(b, &beta) {
        if full_rank {
            return Ok(SupResult::unique(v));
        }
        let n = linalg::null_space(b, d)
            .into_iter()
            .next()
            .expect("rank < d");
        let other = &v + &n;
        return Ok(SupResult::non_unique(v, other));
    }

    // No supremum. Candidate: minimizer of Σ b_i over P (a ⪯_C-minimal element).
    let weight = b.iter().fold(VecD::zeros(d), |acc, bi| &acc + bi);
    let candidate = match upper.minimize(&weight) {
        PolyMin::Optimal { point, .. } => point,
        _ => unreachable!("P is nonempty and Σ⟨b_i, x⟩ is bounded below on P"),
    };
    let vertices = if full_rank { upper.vertices() } else { Vec::new() };
    let dominated = |p: &VecD| b.iter().all(|bi| bi.dot(p) >= bi.dot(&candidate));
    let point = vertices
        .iter()
        .find(|v| !dominated(v))
        .cloned()
        .or_else(|| argmins.iter().find(|p| !dominated(p)).cloned())
        .expect("some upper bound escapes candidate + C");
    Ok(SupResult {
        status: SupStatus::NotExists,
        certificate: Some(Certificate::Undominated {
            candidate,
            point,
            vertices,
        }),
    })
}

#[derive(Debug, Clone, Copy)]
pub struct GeneralSup {
    pub max_dim: usize,
    pub max_inequalities: usize,
}

impl Default for GeneralSup {
    fn default() -> Self {
        GeneralSup {
            max_dim: MAX_VERTEX_DIM,
            max_inequalities: MAX_VERTEX_INEQUALITIES,
        }
    }
}

impl SupremumMethod for GeneralSup {
    fn name(&self) -> &'static str {
        "general"
    }

    fn supports(&self, cone: &Cone) -> bool {
        cone.dual().is_some()
    }

    fn supremum(&self, cone: &Cone, xs: &[VecD]) -> Result<SupResult> {
        vsup_general_with_limits(cone, xs, self.max_dim, self.max_inequalities)
    }
}
