use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use abcact::constructions::gs::nadic_encoding;
use abcact::constructions::{
    denjoy_circle_build, flowblock_build, gs_build, rotation_number_estimate, rotation_vector_group, BaseRecipe,
    ConstructionError, DenjoySpec, FlowBlockSpec, SChoice,
};
use abcact::dynamics1d::{homomorphism_residual, interior_grid, relation_residuals, Domain, GroupAction, IntervalMap};
use abcact::exactmath::{rat, ratio, RationalMatrix};
use abcact::groupcore::GroupElement;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn gs_encodings_agree(p in -60i64..=60, q in 0u32..=4, extra in 1u32..=3, n in 2u32..=3, two_fixed in any::<bool>()) {
        let recipe = if two_fixed { BaseRecipe::TwoFixedPoints } else { BaseRecipe::Linear };
        let act = gs_build(n, recipe).unwrap();
        let grid = interior_grid(-1.0, 2.0, 1000);
        let scale = (n as i64).pow(extra);
        for &x in &grid {
            let r = (act.theta(p * scale, q + extra, x) - act.theta(p, q, x)).abs();
            prop_assert!(r <= 1e-10, "x={x} residual {r}");
        }
        // The reduced encoding denotes the same rational.
        if p != 0 {
            let v = ratio(p, (n as i64).pow(q));
            let (pp, qq) = nadic_encoding(&v, n).unwrap();
            prop_assert_eq!(ratio(pp, (n as i64).pow(qq)), v);
            prop_assert!(qq == 0 || pp % n as i64 != 0);
        }
    }

    #[test]
    fn rotation_lifts_estimate_rigid_rotations(num in 1i64..200, den in 201i64..400) {
        let alpha = num as f64 / den as f64;
        let lift = IntervalMap::new(Domain::CircleLift, "rotation", move |x| x + alpha).with_inverse(move |y| y - alpha);
        let e = rotation_number_estimate(&lift, 10_000).unwrap();
        prop_assert!((e.value - alpha).abs() <= e.error_bar);
    }
}

#[test]
fn gs_base_condition_and_homomorphism() {
    let grid = interior_grid(-1.0, 2.0, 1000);
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for recipe in [BaseRecipe::Linear, BaseRecipe::TwoFixedPoints] {
        let act = gs_build(2, recipe).unwrap();
        let f = act.base();
        assert_eq!(f.eval(0.0), 0.0);
        // f(x+1) = f(x) + 2, sampled independently of condition_residual.
        for &x in &grid {
            assert!((f.eval(x + 1.0) - f.eval(x) - 2.0).abs() <= 1e-10);
        }
        assert!(f.condition_residual(1000) <= 1e-10);
        let mut worst: f64 = 0.0;
        for _ in 0..200 {
            let mut el = || GroupElement::new(rng.gen_range(-3..=3), vec![ratio(rng.gen_range(-64..=64), 1 << rng.gen_range(0..=5))]);
            let (g1, g2) = (el(), el());
            worst = worst.max(homomorphism_residual(&act, &g1, &g2, &grid).unwrap());
        }
        assert!(worst < 1e-9, "{worst}");
        assert!(relation_residuals(&act, &grid).unwrap().max < 1e-9);
    }
}

#[test]
fn gs_rejects_bad_bases() {
    // f(1) = 3 is not f(0) + 2.
    let r = gs_build(2, BaseRecipe::Spline { knots: vec![[0.0, 0.0, 2.0], [1.0, 3.0, 2.0]] });
    assert!(matches!(r, Err(ConstructionError::Precondition(_))));
}

fn corpus_matrices() -> Vec<RationalMatrix> {
    vec![
        RationalMatrix::from_i64(&[&[0, 0, 0, -1], &[1, 0, 0, -4], &[0, 1, 0, -4], &[0, 0, 1, -4]]),
        RationalMatrix::from_i64(&[&[2]]),
        RationalMatrix::from_i64(&[&[3]]),
        RationalMatrix::from_i64(&[&[1, 1], &[1, 0]]),
        RationalMatrix::from_i64(&[&[0, -1], &[1, 0]]),
        RationalMatrix::from_i64(&[&[2, 0], &[0, 3]]),
    ]
}

#[test]
fn flowblock_relations_on_corpus() {
    for a in corpus_matrices() {
        let d = a.rows();
        let mut t0 = vec![rat(0); d];
        t0[0] = rat(1);
        let s = SChoice::Vector { values: (0..d).map(|i| 1.0 / (i + 1) as f64).collect() };
        let act = flowblock_build(&a, &FlowBlockSpec { s, t0, ratio: 2.0, range: 40 }).unwrap();
        let mut grid = Vec::new();
        for j in -6..6 {
            let (lo, hi) = (act.sigma(j), act.sigma(j + 1));
            grid.extend((0..50).map(|i| lo + (hi - lo) * (i as f64 + 0.5) / 50.0));
        }
        let r = relation_residuals(&act, &grid).unwrap();
        assert!(r.max < 1e-8, "{:?} {r:?}", a.to_rows());
        assert!(act.endpoint_residual(30) <= 1e-10);
        assert!(act.extension_residual(&act.t0_f64(), 5, 20) < 1e-8);
        // Blocks tile (0,1): σ is increasing with σ(k) → 0, 1.
        assert!((-30..30).all(|k| act.sigma(k) < act.sigma(k + 1)));
    }
}

fn det(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 1 {
        return m[0][0].clone();
    }
    (0..n)
        .map(|j| {
            let minor: Vec<Vec<BigInt>> = m[1..].iter().map(|r| r.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, x)| x.clone()).collect()).collect();
            let s = if j % 2 == 0 { BigInt::one() } else { -BigInt::one() };
            s * &m[0][j] * det(&minor)
        })
        .sum()
}

#[test]
fn rotation_group_order_is_det_of_at_minus_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    let mut tested = 0;
    while tested < 100 {
        let n = rng.gen_range(1..=4);
        let rows: Vec<Vec<i64>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(-4..=4)).collect()).collect();
        let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
        let a = RationalMatrix::from_i64(&refs);
        // Aᵀ - I by hand.
        let m: Vec<Vec<BigInt>> = (0..n).map(|i| (0..n).map(|j| BigInt::from(rows[j][i] - i64::from(i == j))).collect()).collect();
        let dm = det(&m);
        let da = det(&rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect::<Vec<_>>());
        if dm.is_zero() {
            if !da.is_zero() {
                assert!(matches!(rotation_vector_group(&a), Err(ConstructionError::InfiniteFamily)));
            }
            continue;
        }
        let g = rotation_vector_group(&a).unwrap();
        assert_eq!(g.order_int(), dm.abs());
        if let Some(reps) = &g.representatives {
            assert_eq!(BigInt::from(reps.len()), dm.abs());
            for r in reps {
                for row in &m {
                    let s: num_rational::BigRational = row.iter().zip(r).map(|(x, y)| y * num_rational::BigRational::from_integer(x.clone())).sum();
                    assert!(s.is_integer());
                }
            }
        }
        tested += 1;
    }
}

#[test]
fn denjoy_actions_for_several_irrational_targets() {
    let a = RationalMatrix::from_i64(&[&[2]]);
    for target in [(5f64.sqrt() - 1.0) / 2.0, 2f64.sqrt() - 1.0, std::f64::consts::E - 2.0, std::f64::consts::PI - 3.0] {
        let act = denjoy_circle_build(&a, &DenjoySpec { rotation: target, ..DenjoySpec::default() }).unwrap();
        let audit = act.audit(100_000).unwrap();
        assert!(audit.rotation_target_error < 1e-4, "{target} {}", audit.rotation_target_error);
        assert!(audit.periodic.pass);
        assert!(audit.rotation_b.iter().all(|r| r.value == 0.0));
        assert!(audit.relations.max < 1e-8);
        for i in 0..500 {
            let x = i as f64 / 500.0;
            assert!((act.a_power(1, x + 1.0) - act.a_power(1, x) - 1.0).abs() <= 1e-10);
            assert!((act.b(&[1.0], x + 1.0) - act.b(&[1.0], x) - 1.0).abs() <= 1e-10);
        }
        let g = act.element(&GroupElement::new(1, vec![rat(1)])).unwrap();
        assert!(g.check(1000).ok);
    }
    let r = denjoy_circle_build(&a, &DenjoySpec { rotation: 0.375, ..DenjoySpec::default() });
    assert!(matches!(r, Err(ConstructionError::Precondition(_))));
}
