use crate::cone::Cone;
use crate::error::{Error, Result};
use crate::scalar::VecD;

use super::{check_points, SupResult, SupremumMethod};

/// Coordinate-wise maximum: the unique supremum under the orthant order.
pub fn vsup_componentwise(xs: &[VecD]) -> Result<VecD> {
    let (first, rest) = xs
        .split_first()
        .ok_or(Error::Empty("supremum of an empty collection"))?;
    let mut out = first.clone();
    for x in rest {
        x.check_dim(out.dim())?;
        for (o, xi) in out.0.iter_mut().zip(&x.0) {
            if xi > o {
                *o = xi.clone();
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Default, Clone, Copy)]
pub struct ComponentWiseSup;

impl SupremumMethod for ComponentWiseSup {
    fn name(&self) -> &'static str {
        "componentwise"
    }

    fn supports(&self, cone: &Cone) -> bool {
        cone.is_componentwise()
    }

    fn supremum(&self, cone: &Cone, xs: &[VecD]) -> Result<SupResult> {
        if !cone.is_componentwise() {
            return Err(Error::UnsupportedCone(
                "the componentwise method needs the orthant cone".into(),
            ));
        }
        check_points(cone, xs)?;
        vsup_componentwise(xs).map(SupResult::unique)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coordinatewise_max() {
        let xs = [
            VecD::from_ints(&[4, 4]),
            VecD::from_ints(&[6, 2]),
            VecD::from_ints(&[6, 2]),
            VecD::from_ints(&[4, 4]),
        ];
        assert_eq!(vsup_componentwise(&xs).unwrap(), VecD::from_ints(&[6, 4]));
        let xs = [
            VecD::from_ratios(&[(9, 2), (4, 1)]),
            VecD::from_ints(&[3, 4]),
            VecD::from_ints(&[3, 4]),
            VecD::from_ratios(&[(9, 2), (3, 1)]),
        ];
        assert_eq!(vsup_componentwise(&xs).unwrap(), VecD::from_ratios(&[(9, 2), (4, 1)]));
        let x = VecD::from_ints(&[-1, 7]);
        assert_eq!(vsup_componentwise(std::slice::from_ref(&x)).unwrap(), x);
        assert!(vsup_componentwise(&[]).is_err());
    }

    #[test]
    fn rejects_other_cones() {
        let h = Cone::halfspace(VecD::from_ints(&[1, 0])).unwrap();
        assert!(ComponentWiseSup.supremum(&h, &[VecD::from_ints(&[0, 0])]).is_err());
    }
}
