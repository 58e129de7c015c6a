use std::collections::{BTreeSet, HashMap};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use robust_vdp::dp::{ControlledProblem, ProblemMode, Relation, RelationClass, State};
use robust_vdp::io::{parse_cone_file, parse_instance, parse_points};
use robust_vdp::random::{random_problem, RandomSpec};
use robust_vdp::rectangular::is_m_rectangular;
use robust_vdp::scalar::{ratio, Scalar, VecD};
use robust_vdp::stochastic::{cond_expect, leq_t, vsup_adapted, AdaptedVector, Model, NodeId, ScenarioTree};
use robust_vdp::vsup::{vsup, Certificate, SupStatus};
use robust_vdp::{Cone, SupRegistry};

const THETA: &str = include_str!("../instances/binomial_tables.json");
const THETA0: &str = include_str!("../instances/binomial_tables_theta0.json");
const MARGINALS: &str = include_str!("../instances/binomial_marginals.json");
const OCT_CONE: &str = include_str!("../instances/octagonal_cone.json");
const OCT_POINTS: &str = include_str!("../instances/octagonal_points.json");
const HALF_CONE: &str = include_str!("../instances/halfspace_cone.json");
const HALF_POINTS: &str = include_str!("../instances/halfspace_points.json");

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn q(s: &str) -> Scalar {
    match s.split_once('/') {
        Some((p, d)) => ratio(p.parse().unwrap(), d.parse().unwrap()),
        None => ratio(s.parse().unwrap(), 1),
    }
}

fn v(a: &str, b: &str) -> VecD {
    VecD(vec![q(a), q(b)])
}

fn problem(text: &str) -> ControlledProblem {
    parse_instance(text).expect("bundled instance parses")
}

fn terminal(p: &ControlledProblem, name: &str) -> AdaptedVector {
    let root = p.tree.root();
    let s = p
        .enumerate_strategies(0, root, &State::default())
        .unwrap()
        .into_iter()
        .find(|s| s.name == name)
        .expect("strategy present");
    p.terminal_loss(&s).unwrap()
}

fn node(p: &ControlledProblem, name: &str) -> NodeId {
    p.tree.lookup(name).unwrap()
}

// Expectation rows for phi and psi: (E_1 at u, E_1 at d, E_0) per model theta1..theta8.
const PHI_EXPECTATIONS: [[(&str, &str); 3]; 8] = [
    [("4", "4"), ("4", "4"), ("4", "4")],
    [("6", "2"), ("2", "2"), ("4", "2")],
    [("6", "2"), ("4", "4"), ("5", "3")],
    [("4", "4"), ("2", "2"), ("3", "3")],
    [("4", "4"), ("4", "4"), ("4", "4")],
    [("4", "4"), ("2", "2"), ("5/2", "5/2")],
    [("6", "2"), ("4", "4"), ("9/2", "7/2")],
    [("6", "2"), ("2", "2"), ("3", "2")],
];

const PSI_EXPECTATIONS: [[(&str, &str); 3]; 8] = [
    [("0", "4"), ("6", "4"), ("9/2", "4")],
    [("0", "6"), ("6", "2"), ("3", "4")],
    [("0", "6"), ("6", "4"), ("3", "5")],
    [("0", "4"), ("6", "2"), ("3", "3")],
    [("0", "4"), ("6", "4"), ("3", "4")],
    [("0", "4"), ("6", "2"), ("9/2", "5/2")],
    [("0", "6"), ("6", "4"), ("9/2", "9/2")],
    [("0", "6"), ("6", "2"), ("9/2", "3")],
];

fn reproduce_table(strategy: &str, table: &[[(&str, &str); 3]; 8]) -> Outcome {
    let start = Instant::now();
    let p = problem(THETA);
    let x = terminal(&p, strategy);
    let (u, d, root) = (node(&p, "u"), node(&p, "d"), node(&p, "root"));
    let mut entries = 0;
    for (k, row) in table.iter().enumerate() {
        let id = format!("theta{}", k + 1);
        let m = p.family.get(&id).ok_or(format!("model {id} missing"))?;
        let e1 = cond_expect(&p.tree, m, &x, 1).unwrap();
        let e0 = cond_expect(&p.tree, m, &x, 0).unwrap();
        let got = [e1.at(&p.tree, u), e1.at(&p.tree, d), e0.at(&p.tree, root)];
        for (j, &(a, b)) in row.iter().enumerate() {
            let want = v(a, b);
            check(got[j] == &want, || format!("{id} entry {j}: got {}, want {want}", got[j]))?;
            entries += 1;
        }
    }
    let took = start.elapsed();
    check(took < Duration::from_secs(1), || format!("took {took:?}"))?;
    Ok(format!("{entries} entries exact in {took:.2?}"))
}

fn criterion_1() -> Outcome {
    reproduce_table("phi", &PHI_EXPECTATIONS)
}

fn criterion_2() -> Outcome {
    reproduce_table("psi", &PSI_EXPECTATIONS)
}

fn criterion_3() -> Outcome {
    let mut checked = 0;
    for (label, text) in [("Theta", THETA), ("Theta0", THETA0)] {
        let p = problem(text);
        let method = p.sup.clone();
        let (u, d, root) = (node(&p, "u"), node(&p, "d"), node(&p, "root"));
        for (strategy, at_u, at_d, nested) in [
            ("phi", v("6", "4"), v("4", "4"), v("5", "4")),
            ("psi", v("0", "6"), v("6", "4"), v("9/2", "5")),
        ] {
            let x = terminal(&p, strategy);
            let e1: Vec<AdaptedVector> = p
                .models()
                .iter()
                .map(|m| cond_expect(&p.tree, m, &x, 1).unwrap())
                .collect();
            let s1 = vsup_adapted(method.as_ref(), &p.cone, &p.tree, &e1).unwrap();
            let s1 = s1.value().ok_or("missing t=1 supremum")?.clone();
            check(s1.at(&p.tree, u) == &at_u && s1.at(&p.tree, d) == &at_d, || {
                format!("{label} {strategy} t=1: got {s1}")
            })?;
            let e0: Vec<AdaptedVector> = p
                .models()
                .iter()
                .map(|m| cond_expect(&p.tree, m, &s1, 0).unwrap())
                .collect();
            let s0 = vsup_adapted(method.as_ref(), &p.cone, &p.tree, &e0).unwrap();
            let s0 = s0.value().ok_or("missing t=0 supremum")?.clone();
            check(s0.at(&p.tree, root) == &nested, || {
                format!("{label} {strategy} nested t=0: got {s0}")
            })?;
            checked += 2;
        }
    }
    Ok(format!("{checked} suprema exact across both families"))
}

fn set(xs: &[VecD]) -> BTreeSet<VecD> {
    xs.iter().cloned().collect()
}

fn criterion_4() -> Outcome {
    let expected_b = set(&[v("5", "4"), v("9/2", "5")]);
    for (label, text, expected_v) in [
        ("Theta", THETA, set(&[v("5", "4"), v("9/2", "5")])),
        ("Theta0", THETA0, set(&[v("4", "4"), v("9/2", "4")])),
    ] {
        let p = problem(text);
        let v0 = p.value_function(0).unwrap();
        let got = set(&v0.first().elements);
        check(got == expected_v, || format!("V0({label}) = {got:?}"))?;
        let b = p.backward_value().unwrap();
        let got = set(&b[0].first().elements);
        check(got == expected_b, || format!("B0({label}) = {got:?}"))?;
    }
    Ok("V0 and B0 exact for both families".into())
}

fn criterion_5() -> Outcome {
    let rect = problem(THETA).check_bellman().unwrap();
    check(rect.check(0, Relation::VEqualsB).is_some_and(|c| c.holds), || {
        "V0 = B0 not reported for Theta".into()
    })?;
    check(rect.all_pass(), || "some relation fails for Theta".into())?;
    let non = problem(THETA0).check_bellman().unwrap();
    check(non.holds(RelationClass::Weak), || "weak relations fail for Theta0".into())?;
    check(non.strictly_weak(), || "Theta0 inclusions are not strict".into())?;
    check(non.check(0, Relation::VEqualsB).is_some_and(|c| !c.holds), || {
        "V0 = B0 wrongly reported for Theta0".into()
    })?;
    Ok("Theta: all relations hold; Theta0: weak only, equality fails at t=0".into())
}

const THETA_UP_PROBABILITIES: [(&str, &str, &str); 8] = [
    ("1/4", "1/2", "1/2"),
    ("1/2", "3/4", "3/4"),
    ("1/2", "3/4", "1/2"),
    ("1/2", "1/2", "3/4"),
    ("1/2", "1/2", "1/2"),
    ("1/4", "1/2", "3/4"),
    ("1/4", "3/4", "1/2"),
    ("1/4", "3/4", "3/4"),
];

fn up_probabilities(p: &ControlledProblem) -> BTreeSet<(Scalar, Scalar, Scalar)> {
    let (root, u, d) = (node(p, "root"), node(p, "u"), node(p, "d"));
    p.models()
        .iter()
        .map(|m: &Model| (m.prob(root, 0).clone(), m.prob(u, 0).clone(), m.prob(d, 0).clone()))
        .collect()
}

fn criterion_6() -> Outcome {
    let theta = problem(THETA);
    let theta0 = problem(THETA0);
    check(is_m_rectangular(&theta.tree, &theta.family), || "Theta not m-rectangular".into())?;
    check(!is_m_rectangular(&theta0.tree, &theta0.family), || "Theta0 m-rectangular".into())?;
    let table: BTreeSet<(Scalar, Scalar, Scalar)> = THETA_UP_PROBABILITIES.iter().map(|&(a, b, c)| (q(a), q(b), q(c))).collect();
    let built = problem(MARGINALS);
    check(built.family.len() == 8, || format!("{} models", built.family.len()))?;
    check(up_probabilities(&built) == table, || "rectangularized family differs from the reference family".into())?;
    check(up_probabilities(&theta) == table, || "bundled Theta differs from the reference family".into())?;
    Ok("Theta rectangular, Theta0 not; rectangularized marginals give the 8 reference models".into())
}

fn dual_value(b: &[VecD], x: &VecD) -> Vec<Scalar> {
    b.iter().map(|bi| bi.dot(x)).collect()
}

fn dominates(b: &[VecD], lower: &VecD, upper: &VecD) -> bool {
    let diff = upper - lower;
    dual_value(b, &diff).iter().all(|x| !x.is_negative())
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let cone = parse_cone_file(OCT_CONE).unwrap();
    let points = parse_points(OCT_POINTS, 3).unwrap();
    let general = SupRegistry::default().get("general").unwrap();
    let r = general.supremum(&cone, &points).unwrap();
    let took = start.elapsed();
    check(r.status == SupStatus::NotExists, || format!("status {:?}", r.status))?;
    let Some(Certificate::Undominated {
        candidate,
        point,
        vertices,
    }) = &r.certificate
    else {
        return Err(format!("certificate {:?}", r.certificate));
    };
    let b = cone.dual().unwrap();
    for x in &points {
        check(dominates(b, x, candidate) && dominates(b, x, point), || {
            "certificate points are not upper bounds".into()
        })?;
    }
    check(!dominates(b, candidate, point), || "certificate vertex dominates the candidate".into())?;
    check(vertices.contains(point), || "certificate point is not a vertex".into())?;
    check(vertices.len() == 3, || format!("{} vertices", vertices.len()))?;
    check(took < Duration::from_secs(5), || format!("took {took:?}"))?;
    Ok(format!("NotExists, certificate vertex {point} in {took:.2?}"))
}

fn criterion_8() -> Outcome {
    let cone = parse_cone_file(HALF_CONE).unwrap();
    let points = parse_points(HALF_POINTS, 2).unwrap();
    let w = VecD(vec![q("1"), q("0")]);
    let level = points.iter().map(|x| w.dot(x)).max().unwrap();
    let r = vsup(&cone, &points).unwrap();
    let SupStatus::NonUniqueWitness(first) = &r.status else {
        return Err(format!("status {:?}", r.status));
    };
    let Some(Certificate::SecondSupremum(second)) = &r.certificate else {
        return Err(format!("certificate {:?}", r.certificate));
    };
    check(first != second, || "witnesses coincide".into())?;
    for s in [first, second] {
        check(w.dot(s) == level, || format!("{s} is off the hyperplane"))?;
    }
    Ok(format!("witnesses {first} and {second} on <w,x> = {level}"))
}

fn criterion_9() -> Outcome {
    let start = Instant::now();
    let mut weak_ok = 0;
    let mut rect_total = 0;
    let mut rect_ok = 0;
    let n = 200u64;
    for seed in 0..n {
        let spec = if seed % 2 == 0 {
            RandomSpec::default()
        } else {
            RandomSpec::default().rectangular()
        };
        let p = random_problem(seed, &spec);
        let report = p.check_bellman().map_err(|e| format!("seed {seed}: {e}"))?;
        if report.holds(RelationClass::Weak) {
            weak_ok += 1;
        } else {
            return Err(format!("seed {seed}: weak relation fails"));
        }
        if is_m_rectangular(&p.tree, &p.family) {
            rect_total += 1;
            let equal = (0..p.horizon()).all(|t| {
                report.check(t, Relation::VEqualsR).is_some_and(|c| c.holds)
                    && report.check(t, Relation::VEqualsB).is_some_and(|c| c.holds)
            });
            if equal {
                rect_ok += 1;
            } else {
                return Err(format!("seed {seed}: V, R, B differ on an m-rectangular family"));
            }
        }
    }
    let took = start.elapsed();
    check(rect_total >= 100, || format!("only {rect_total} m-rectangular instances"))?;
    check(took < Duration::from_secs(60), || format!("took {took:?}"))?;
    Ok(format!(
        "weak {weak_ok}/{n}, equality {rect_ok}/{rect_total} m-rectangular, {took:.1?}"
    ))
}

struct TestCone {
    cone: Cone,
    dual: Vec<VecD>,
    gens: Option<Vec<VecD>>,
}

fn grid<R: Rng>(rng: &mut R) -> Scalar {
    ratio(rng.gen_range(-8..=8), [1, 2, 4][rng.gen_range(0..3)])
}

fn grid_vec<R: Rng>(rng: &mut R, d: usize) -> VecD {
    VecD((0..d).map(|_| grid(rng)).collect())
}

fn cross(a: &VecD, b: &VecD) -> VecD {
    let (a, b) = (a.components(), b.components());
    VecD(vec![
        &a[1] * &b[2] - &a[2] * &b[1],
        &a[2] * &b[0] - &a[0] * &b[2],
        &a[0] * &b[1] - &a[1] * &b[0],
    ])
}

fn test_cones<R: Rng>(rng: &mut R) -> Vec<TestCone> {
    let mut out = Vec::new();
    for d in 1..=3 {
        let units: Vec<VecD> = (0..d).map(|i| VecD::unit(d, i)).collect();
        out.push(TestCone {
            cone: Cone::componentwise(d),
            dual: units.clone(),
            gens: Some(units),
        });
    }
    for w in [v("1", "1"), v("1", "0"), v("2", "-1")] {
        out.push(TestCone {
            cone: Cone::halfspace(w.clone()).unwrap(),
            dual: vec![w],
            gens: None,
        });
    }
    // simplicial cones in R^2 and R^3 from random generators
    while out.len() < 10 {
        let g1 = grid_vec(rng, 2);
        let g2 = grid_vec(rng, 2);
        let det = &g1.components()[0] * &g2.components()[1] - &g1.components()[1] * &g2.components()[0];
        if det.is_zero() {
            continue;
        }
        let rot = |g: &VecD, other: &VecD| {
            let r = VecD(vec![-g.components()[1].clone(), g.components()[0].clone()]);
            if r.dot(other).is_negative() {
                -&r
            } else {
                r
            }
        };
        let b = vec![rot(&g1, &g2), rot(&g2, &g1)];
        let cone = Cone::from_dual(2, b.clone()).unwrap().with_generators(vec![g1.clone(), g2.clone()]).unwrap();
        out.push(TestCone {
            cone,
            dual: b,
            gens: Some(vec![g1, g2]),
        });
    }
    while out.len() < 13 {
        let g: Vec<VecD> = (0..3).map(|_| grid_vec(rng, 3)).collect();
        let mut b = Vec::new();
        for i in 0..3 {
            let c = cross(&g[(i + 1) % 3], &g[(i + 2) % 3]);
            b.push(if c.dot(&g[i]).is_negative() { -&c } else { c });
        }
        if b.iter().zip(&g).any(|(bi, gi)| bi.dot(gi).is_zero()) {
            continue;
        }
        let cone = Cone::from_dual(3, b.clone()).unwrap().with_generators(g.clone()).unwrap();
        out.push(TestCone {
            cone,
            dual: b,
            gens: Some(g),
        });
    }
    // a wedge in R^3: two dual inequalities, a line of non-uniqueness
    let b = vec![VecD::from_ints(&[1, 0, 1]), VecD::from_ints(&[0, 1, -1])];
    out.push(TestCone {
        cone: Cone::from_dual(3, b.clone()).unwrap(),
        dual: b,
        gens: None,
    });
    out
}

fn in_cone(tc: &TestCone, z: &VecD) -> bool {
    tc.dual.iter().all(|b| !b.dot(z).is_negative())
}

fn cone_element<R: Rng>(rng: &mut R, tc: &TestCone) -> VecD {
    let d = tc.cone.dim();
    match &tc.gens {
        Some(gens) => {
            let mut z = VecD::zeros(d);
            for g in gens {
                z.add_scaled(&ratio(rng.gen_range(0..=4), [1, 2][rng.gen_range(0..2)]), g);
            }
            z
        }
        None => loop {
            let z = grid_vec(rng, d);
            if in_cone(tc, &z) {
                break z;
            }
        },
    }
}

fn bump(counts: &mut HashMap<&'static str, usize>, k: &'static str) {
    *counts.entry(k).or_default() += 1;
}

fn criterion_10() -> Outcome {
    const CASES: usize = 1000;
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let cones = test_cones(&mut rng);
    let mut counts: HashMap<&str, usize> = HashMap::new();
    let mut rounds = 0;
    while rounds < 20 * CASES {
        rounds += 1;
        let tc = &cones[rounds % cones.len()];
        let d = tc.cone.dim();
        let c = &tc.cone;
        let x = grid_vec(&mut rng, d);
        let y = &x + &cone_element(&mut rng, tc);
        let z = &y + &cone_element(&mut rng, tc);
        let shift = grid_vec(&mut rng, d);
        let alpha = ratio(rng.gen_range(0..=6), 2);

        check(c.leq(&x, &x).unwrap(), || format!("reflexivity fails at {x}"))?;
        bump(&mut counts, "reflexivity");
        check(c.leq(&x, &y).unwrap() && c.leq(&y, &z).unwrap() && c.leq(&x, &z).unwrap(), || {
            format!("transitivity fails for {x}, {y}, {z}")
        })?;
        let w = grid_vec(&mut rng, d);
        if c.leq(&x, &w).unwrap() && c.leq(&w, &z).unwrap() {
            check(c.leq(&x, &z).unwrap(), || "transitivity fails on a random chain".into())?;
        }
        bump(&mut counts, "transitivity");
        check(
            c.leq(&(&x + &shift), &(&y + &shift)).unwrap() && c.leq(&x.scale(&alpha), &y.scale(&alpha)).unwrap(),
            || format!("vector compatibility fails for {x}, {y}"),
        )?;
        check(c.leq(&x, &w).unwrap() == in_cone(tc, &(&w - &x)), || {
            "order disagrees with the dual inequalities".into()
        })?;
        bump(&mut counts, "vector compatibility");

        // sup properties on a family of 1..=4 points
        let k = rng.gen_range(1..=4);
        let xs: Vec<VecD> = (0..k).map(|_| grid_vec(&mut rng, d)).collect();
        let ys: Vec<VecD> = xs.iter().map(|x| x + &cone_element(&mut rng, tc)).collect();
        let (Ok(sx), Ok(sy)) = (vsup(c, &xs), vsup(c, &ys)) else {
            return Err("supremum computation failed".into());
        };
        if let (Some(vx), Some(vy)) = (sx.value(), sy.value()) {
            check(c.leq(vx, vy).unwrap(), || format!("monotonicity fails: {vx} vs {vy}"))?;
            bump(&mut counts, "monotone");
        }
        if let Some(vx) = sx.value() {
            for x in &xs {
                check(c.leq(x, vx).unwrap(), || format!("{vx} is not an upper bound"))?;
            }
            match (&sx.status, &sx.certificate) {
                (SupStatus::NonUniqueWitness(a), Some(Certificate::SecondSupremum(b))) => {
                    check(c.leq(a, b).unwrap() && c.leq(b, a).unwrap(), || {
                        format!("witnesses {a}, {b} do not dominate each other")
                    })?;
                    bump(&mut counts, "invariantSup (a)");
                    for _ in 0..4 {
                        let p = grid_vec(&mut rng, d);
                        check(
                            c.leq(a, &p).unwrap() == c.leq(b, &p).unwrap()
                                && c.leq(&p, a).unwrap() == c.leq(&p, b).unwrap(),
                            || format!("V ± C differ for witnesses {a}, {b}"),
                        )?;
                    }
                    bump(&mut counts, "invariantSup (b)");
                }
                (SupStatus::Unique(_), _) => {
                    check(tc.cone.is_pointed(), || "unique supremum under a non-pointed cone".into())?;
                }
                _ => {}
            }
            if tc.cone.is_pointed() {
                check(matches!(sx.status, SupStatus::Unique(_)), || {
                    "pointed cone gave a non-unique supremum".into()
                })?;
                bump(&mut counts, "invariantSup (c)");
            }
            let moved: Vec<VecD> = xs.iter().map(|x| x + &shift).collect();
            let sm = vsup(c, &moved).unwrap();
            let vm = sm.value().ok_or("translated supremum missing")?;
            let target = vx + &shift;
            match sx.status {
                SupStatus::Unique(_) => check(vm == &target, || format!("vsup(xs + b) = {vm}, want {target}"))?,
                _ => check(c.leq(vm, &target).unwrap() && c.leq(&target, vm).unwrap(), || {
                    format!("translated witness {vm} not equivalent to {target}")
                })?,
            }
            bump(&mut counts, "invariantSup (d)");
        }
    }

    // conditional expectation properties on random trees
    let mut rounds = 0;
    while counts.get("tower").copied().unwrap_or(0) < CASES || counts.get("order_exp").copied().unwrap_or(0) < CASES {
        rounds += 1;
        let p = random_problem(rounds, &RandomSpec::default());
        let tree = &p.tree;
        let tc = &cones[rounds as usize % cones.len()];
        let d = tc.cone.dim();
        let s = tree.horizon();
        let x = AdaptedVector::new(tree, s, (0..tree.level(s).len()).map(|_| grid_vec(&mut rng, d)).collect()).unwrap();
        let y = AdaptedVector::new(
            tree,
            s,
            x.values.iter().map(|xi| xi + &cone_element(&mut rng, tc)).collect(),
        )
        .unwrap();
        for m in p.models() {
            for t in 0..s {
                let direct = cond_expect(tree, m, &x, t).unwrap();
                let stepwise = cond_expect(tree, m, &cond_expect(tree, m, &x, t + 1).unwrap(), t).unwrap();
                check(direct == stepwise, || format!("tower property fails at t={t}"))?;
                let ones = AdaptedVector::constant(tree, s, VecD::ones(d));
                check(cond_expect(tree, m, &ones, t).unwrap() == AdaptedVector::constant(tree, t, VecD::ones(d)), || {
                    "expectation of 1 is not 1".into()
                })?;
                bump(&mut counts, "tower");
                let ey = cond_expect(tree, m, &y, t).unwrap();
                check(leq_t(&tc.cone, &direct, &ey).unwrap(), || format!("order_exp fails at t={t}"))?;
                bump(&mut counts, "order_exp");
            }
        }
        if rounds > 100_000 {
            return Err("could not generate enough expectation cases".into());
        }
    }

    let mut names: Vec<_> = counts.iter().collect();
    names.sort();
    let short: Vec<_> = names.iter().filter(|(_, &n)| n < CASES).map(|(k, n)| format!("{k}: {n}")).collect();
    check(short.is_empty(), || format!("too few cases: {}", short.join(", ")))?;
    let min = counts.values().min().copied().unwrap_or(0);
    Ok(format!("{} properties, at least {min} cases each", counts.len()))
}

/// Classical backward induction over the explicit dynamics: the set of achievable
/// expected losses and its minimum.
fn scalar_oracle(p: &ControlledProblem) -> (BTreeSet<Scalar>, Scalar) {
    let ProblemMode::Dynamics(dy) = &p.mode else {
        panic!("dynamics expected")
    };
    let tree = &p.tree;
    let model = &p.models()[0];
    fn next(dy: &robust_vdp::dp::Dynamics, tree: &ScenarioTree, t: usize, s: &State, a: &str, c: NodeId) -> State {
        let key = (t, s.clone(), a.to_string(), tree.label(c).to_string());
        dy.transitions
            .get(&key)
            .or_else(|| dy.transitions.get(&(t, s.clone(), a.to_string(), "*".to_string())))
            .cloned()
            .unwrap()
    }
    fn values(dy: &robust_vdp::dp::Dynamics, tree: &ScenarioTree, m: &Model, n: NodeId, s: &State) -> (BTreeSet<Scalar>, Scalar) {
        if tree.is_leaf(n) {
            let x = dy.loss[s].components()[0].clone();
            return (BTreeSet::from([x.clone()]), x);
        }
        let t = tree.time(n);
        let mut all = BTreeSet::new();
        let mut best: Option<Scalar> = None;
        for a in &dy.admissible[&(t, s.clone())] {
            let mut acc = BTreeSet::from([Scalar::zero()]);
            let mut cost = Scalar::zero();
            for (i, &c) in tree.children(n).iter().enumerate() {
                let pr = m.prob(n, i).clone();
                let (sub, sub_min) = values(dy, tree, m, c, &next(dy, tree, t, s, a, c));
                acc = acc.iter().flat_map(|x| sub.iter().map(|y| x + &pr * y).collect::<Vec<_>>()).collect();
                cost += pr * sub_min;
            }
            all.extend(acc);
            best = Some(match best {
                Some(b) if b <= cost => b,
                _ => cost,
            });
        }
        (all, best.unwrap())
    }
    values(dy, tree, model, tree.root(), &dy.initial)
}

fn criterion_11() -> Outcome {
    let n = 60u64;
    for seed in 0..n {
        let p = random_problem(1000 + seed, &RandomSpec::scalar());
        let v0 = p.value_function(0).map_err(|e| format!("seed {seed}: {e}"))?;
        let got: BTreeSet<Scalar> = v0.first().elements.iter().map(|x| x.components()[0].clone()).collect();
        let (all, best) = scalar_oracle(&p);
        check(got == all, || format!("seed {seed}: value set differs from the oracle"))?;
        let min = got.iter().min().unwrap();
        check(*min == best, || format!("seed {seed}: min {min} vs oracle {best}"))?;
        check(best <= Scalar::one() * ratio(8, 1) && best >= -ratio(8, 1), || "out of range".into())?;
    }
    Ok(format!("{n} scalar instances match the backward-induction oracle"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("expectation table for phi", criterion_1),
        ("expectation table for psi", criterion_2),
        ("supremum values", criterion_3),
        ("value sets", criterion_4),
        ("Bellman verdicts", criterion_5),
        ("rectangularity", criterion_6),
        ("non-existence detection", criterion_7),
        ("non-uniqueness detection", criterion_8),
        ("random Bellman property suite", criterion_9),
        ("order axioms and sup properties", criterion_10),
        ("scalar reduction", criterion_11),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
