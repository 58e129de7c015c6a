use proptest::prelude::*;

use robust_vdp::scalar::{ratio, VecD};
use robust_vdp::vsup::{vsup, vsup_componentwise, vsup_dual_li, vsup_general, SupStatus};
use robust_vdp::Cone;

fn grid() -> impl Strategy<Value = i64> {
    -8i64..=8
}

fn point(d: usize) -> impl Strategy<Value = VecD> {
    prop::collection::vec((grid(), prop::sample::select(vec![1i64, 2, 4])), d)
        .prop_map(|c| VecD(c.into_iter().map(|(p, q)| ratio(p, q)).collect()))
}

fn points(d: usize) -> impl Strategy<Value = Vec<VecD>> {
    prop::collection::vec(point(d), 1..5)
}

/// A pointed solid cone in the plane spanned by two generators in counterclockwise order,
/// with both representations.
fn plane_cone() -> impl Strategy<Value = Cone> {
    (-4i64..=4, -4i64..=4, -4i64..=4, -4i64..=4)
        .prop_filter("counterclockwise pair", |&(a, b, c, d)| a * d - b * c > 0)
        .prop_map(|(a, b, c, d)| {
            let g = vec![VecD::from_ints(&[a, b]), VecD::from_ints(&[c, d])];
            let dual = vec![VecD::from_ints(&[-b, a]), VecD::from_ints(&[d, -c])];
            Cone::from_generators(2, g).unwrap().with_dual(dual).unwrap()
        })
}

fn value(cone: &Cone, xs: &[VecD]) -> VecD {
    match vsup(cone, xs).unwrap().status {
        SupStatus::Unique(v) | SupStatus::NonUniqueWitness(v) => v,
        SupStatus::NotExists => panic!("supremum expected"),
    }
}

fn is_upper_bound(cone: &Cone, xs: &[VecD], u: &VecD) -> bool {
    xs.iter().all(|x| cone.leq(x, u).unwrap())
}

proptest! {
    #[test]
    fn componentwise_is_the_coordinate_max(xs in points(3)) {
        let s = vsup_componentwise(&xs).unwrap();
        for i in 0..3 {
            let m = xs.iter().map(|x| x.0[i].clone()).max().unwrap();
            prop_assert_eq!(&s.0[i], &m);
        }
    }

    #[test]
    fn plane_supremum_is_a_least_upper_bound(cone in plane_cone(), xs in points(2), u in point(2)) {
        let s = value(&cone, &xs);
        prop_assert!(is_upper_bound(&cone, &xs, &s));
        if is_upper_bound(&cone, &xs, &u) {
            prop_assert!(cone.leq(&s, &u).unwrap());
        }
    }

    #[test]
    fn plane_supremum_always_exists_and_is_unique(cone in plane_cone(), xs in points(2)) {
        let r = vsup(&cone, &xs).unwrap();
        prop_assert!(matches!(r.status, SupStatus::Unique(_)));
    }

    #[test]
    fn general_agrees_with_dual_construction(cone in plane_cone(), xs in points(2)) {
        let a = vsup_dual_li(&cone, &xs).unwrap();
        let b = vsup_general(&cone, &xs).unwrap();
        prop_assert_eq!(a.value(), b.value());
    }

    #[test]
    fn translation_commutes(cone in plane_cone(), xs in points(2), a in point(2)) {
        let shifted: Vec<VecD> = xs.iter().map(|x| x + &a).collect();
        prop_assert_eq!(value(&cone, &shifted), &value(&cone, &xs) + &a);
    }

    #[test]
    fn monotone_in_each_argument(cone in plane_cone(), xs in points(2), k in 1i64..4) {
        let g = cone.generators().unwrap()[0].scale(&ratio(k, 1));
        let bigger: Vec<VecD> = xs.iter().map(|x| x + &g).collect();
        prop_assert!(cone.leq(&value(&cone, &xs), &value(&cone, &bigger)).unwrap());
    }

    #[test]
    fn adding_a_dominated_point_changes_nothing(cone in plane_cone(), xs in points(2)) {
        let s = value(&cone, &xs);
        let below = &s - &cone.generators().unwrap()[1];
        let mut more = xs.clone();
        more.push(below);
        prop_assert_eq!(value(&cone, &more), s);
    }

    #[test]
    fn singleton_supremum_is_the_point(cone in plane_cone(), x in point(2)) {
        prop_assert_eq!(value(&cone, std::slice::from_ref(&x)), x);
    }
}

#[test]
fn empty_collection_is_an_error() {
    assert!(vsup(&Cone::componentwise(2), &[]).is_err());
}

#[test]
fn dimension_mismatch_is_an_error() {
    assert!(vsup(&Cone::componentwise(2), &[VecD::from_ints(&[1, 2, 3])]).is_err());
}
