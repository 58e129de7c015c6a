use num_traits::One;

use crate::cone::Cone;
use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::{Scalar, VecD};

use super::{check_points, SupResult, SupremumMethod};

/// Supremum for cones whose dual cone is generated by linearly independent vectors
/// `b_1..b_k`: solve `⟨b_i, V⟩ = max_θ ⟨b_i, x^θ⟩`.
///
/// Collections are folded pairwise in input order. When `k < d` the system is
/// underdetermined; the canonical solution pivots on the leading independent columns
/// and zeroes the free coordinates, and the certificate adds a null-space vector.
pub fn vsup_dual_li(cone: &Cone, xs: &[VecD]) -> Result<SupResult> {
    check_points(cone, xs)?;
    let b = cone.dual().ok_or(Error::MissingRepresentation("dual"))?;
    if b.is_empty() {
        return Err(Error::UnsupportedCone(
            "the whole space has no dual generators".into(),
        ));
    }
    let r = linalg::rank(b);
    if r < b.len() {
        return Err(Error::DualNotLI {
            rank: r,
            count: b.len(),
        });
    }
    let d = cone.dim();
    let mut acc = xs[0].clone();
    for x in &xs[1..] {
        let alpha: Vec<Scalar> = b
            .iter()
            .map(|bi| {
                let (p, q) = (bi.dot(&acc), bi.dot(x));
                if p >= q {
                    p
                } else {
                    q
                }
            })
            .collect();
        acc = linalg::solve_canonical(b, &alpha).expect("full row rank system is consistent");
    }
    if xs.len() == 1 {
        // a singleton is its own supremum; keep the canonical representative anyway
        let alpha: Vec<Scalar> = b.iter().map(|bi| bi.dot(&xs[0])).collect();
        acc = linalg::solve_canonical(b, &alpha).expect("full row rank system is consistent");
    }
    if b.len() == d {
        Ok(SupResult::unique(acc))
    } else {
        let n = linalg::null_space(b, d)
            .into_iter()
            .next()
            .expect("k < d leaves a nontrivial null space");
        let mut other = acc.clone();
        other.add_scaled(&Scalar::one(), &n);
        Ok(SupResult::non_unique(acc, other))
    }
}

#[derive(Debug, Default, Clone, Copy)]
pub struct DualLiSup;

impl SupremumMethod for DualLiSup {
    fn name(&self) -> &'static str {
        "dual-li"
    }

    fn supports(&self, cone: &Cone) -> bool {
        cone.dual()
            .map(|b| !b.is_empty() && linalg::rank(b) == b.len())
            .unwrap_or(false)
    }

    fn supremum(&self, cone: &Cone, xs: &[VecD]) -> Result<SupResult> {
        vsup_dual_li(cone, xs)
    }
}
