use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use abcact::affinerep::{synthesize, AffineRepresentation};
use abcact::dynamics1d::{
    chart_conjugate, composition_harness, displacement_track, flow_root_check, interior_grid, multiplier_audit,
    relation_residuals, Chart, GroupAction, Tolerances,
};
use abcact::exactmath::{ratio, RationalMatrix};
use abcact::groupcore::GroupElement;
use abcact::spectral::splitting;

const CHARTS: [Chart; 2] = [Chart::Logistic, Chart::MtFlat];

fn reps() -> Vec<(RationalMatrix, AffineRepresentation)> {
    [
        RationalMatrix::from_i64(&[&[2]]),
        RationalMatrix::from_i64(&[&[3]]),
        RationalMatrix::from_i64(&[&[1, 1], &[1, 0]]),
        RationalMatrix::from_i64(&[&[2, 0], &[0, 3]]),
    ]
    .into_iter()
    .map(|m| {
        let r = synthesize(&m).unwrap();
        (m, r)
    })
    .collect()
}

#[test]
fn chart_round_trip_and_monotone() {
    for chart in CHARTS {
        let us = interior_grid(0.0, 1.0, 1000);
        for w in us.windows(2) {
            assert!(chart.inverse(w[1]) > chart.inverse(w[0]));
        }
        for &u in &us {
            assert!((chart.forward(chart.inverse(u)) - u).abs() <= 1e-10, "{} {u}", chart.name());
        }
        let xs: Vec<f64> = (0..1000).map(|i| -30.0 + 60.0 * i as f64 / 999.0).collect();
        for w in xs.windows(2) {
            assert!(chart.forward(w[1]) >= chart.forward(w[0]));
        }
    }
}

#[test]
fn chart_action_maps_are_homeomorphisms_with_small_relation_residuals() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let grid = interior_grid(0.0, 1.0, 1000);
    for (_, rep) in reps() {
        let d = rep.context().dim();
        for chart in CHARTS {
            let act = chart_conjugate(&rep, chart);
            let ctx = act.context();
            let mut gens = vec![ctx.a(), GroupElement::new(-1, ctx.identity().v)];
            for i in 0..d {
                gens.push(ctx.b_i(i));
                gens.push(ctx.invert(&ctx.b_i(i)).unwrap());
            }
            for g in &gens {
                let c = act.element(g).unwrap().check(1000);
                assert!(c.ok, "{} {g:?} {c:?}", chart.name());
            }
            // Longer words can push images within one ulp of 0 or 1, where binary64
            // cannot separate neighbours; strictness is required away from the ends.
            let xs: Vec<f64> = (0..1000).map(|i| i as f64 / 999.0).collect();
            for _ in 0..20 {
                let v = (0..d).map(|_| ratio(rng.gen_range(-10..=10), rng.gen_range(1..=8))).collect();
                let g = GroupElement::new(rng.gen_range(-3..=3), v);
                let f = act.element(&g).unwrap();
                let ys: Vec<f64> = xs.iter().map(|&x| f.eval(x)).collect();
                assert_eq!((ys[0], ys[999]), (0.0, 1.0));
                for w in ys.windows(2) {
                    assert!(w[1] >= w[0]);
                    if w[0] > 1e-12 && w[1] < 1.0 - 1e-12 {
                        assert!(w[1] > w[0], "{} {g:?}", chart.name());
                    }
                }
            }
            let r = relation_residuals(&act, &grid).unwrap();
            assert!(r.max < 1e-8, "{} {r:?}", chart.name());
        }
    }
}

#[test]
fn multiplier_is_chart_independent() {
    let tol = Tolerances::default();
    for (_, rep) in reps() {
        for k in [1, 2, -1] {
            let got: Vec<f64> = CHARTS
                .iter()
                .map(|&c| {
                    let act = chart_conjugate(&rep, c);
                    multiplier_audit(&act, &GroupElement::new(k, act.context().identity().v), &rep, &tol).unwrap().measured
                })
                .collect();
            let want = rep.lambda_f64().powi(k as i32);
            assert!((got[0] - got[1]).abs() <= 2e-6, "{got:?}");
            assert!(got.iter().all(|m| (m - want).abs() <= 2e-6), "{got:?} vs {want}");
        }
    }
}

#[test]
fn displacement_residual_decreases_toward_the_fixed_point() {
    for m in [RationalMatrix::from_i64(&[&[1, 1], &[1, 0]]), RationalMatrix::from_i64(&[&[2, 0], &[0, 3]])] {
        let rep = synthesize(&m).unwrap();
        let split = splitting(&m).unwrap();
        let act = chart_conjugate(&rep, Chart::MtFlat);
        let tr = displacement_track(&act, &split, 0.9, 12, 0.5, 0.2).unwrap();
        assert!(tr.residuals[9] < tr.residuals[0], "{:?}", tr.residuals);
        let ctx = act.context();
        for dv in &tr.vectors {
            for (i, di) in dv.delta.iter().enumerate() {
                let bi = act.element(&ctx.b_i(i)).unwrap();
                assert!((bi.eval(dv.x) - dv.x - di).abs() <= 1e-12);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn composition_estimate_has_no_violations(seed in any::<u64>(), k_max in 1usize..=6) {
        let h = composition_harness(200, seed, 0.1, k_max).unwrap();
        prop_assert_eq!(h.violations, 0);
        for q in [2, 3, 5] {
            prop_assert_eq!(flow_root_check(q, 50, seed, 0.1).violations, 0);
        }
    }
}
