//! Composition estimate for maps `C¹`-close to the identity:
//!
//! `|[f_k^{ε_k}∘…∘f_1^{ε_1}(x) - x] - Σ ε_i (f_i(x) - x)| ≤ η max_j |f_j(x) - x|`
//!
//! whenever every `f_i` satisfies `sup |Df_i - 1| < δ` for a suitable `δ(k, η)`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::flows::logistic_flow;
use super::map::{Domain, IntervalMap};
use super::DynamicsError;

/// Radius from the inductive chain `δ_1 = ∞`, `δ_k(η) = min(δ_{k-1}(η/2), (η/2)/(k-1+η/2))`,
/// shrunk by a factor `0.999` to make the inequality strict.
fn chain_delta(k: usize, eta: f64) -> f64 {
    if k <= 1 {
        return f64::INFINITY;
    }
    let half = eta / 2.0;
    chain_delta(k - 1, half).min(0.999 * half / (k as f64 - 1.0 + half))
}

/// Worst-case ratio residual / max displacement for `k` maps with
/// `|Df - 1| < δ`, any signs.
fn mixed_sign_coefficient(k: usize, delta: f64) -> f64 {
    let dp = delta / (1.0 - delta);
    let k = k as f64;
    let drift = ((1.0 + dp).powf(k) - 1.0) / dp - k;
    (drift.max(0.0) + k * delta) / (1.0 - delta)
}

/// `δ` for words of length `k` and slack `η`: the inductive chain, further
/// reduced when needed so that words containing inverses are also covered.
pub fn calibrated_delta(k: usize, eta: f64) -> f64 {
    let chain = chain_delta(k, eta);
    let (mut lo, mut hi) = (0.0, 0.5f64);
    for _ in 0..100 {
        let m = 0.5 * (lo + hi);
        if mixed_sign_coefficient(k, m) < eta {
            lo = m;
        } else {
            hi = m;
        }
    }
    chain.min(lo)
}

/// `sup |Df - 1|` over an `n`-point grid of `[0,1]`.
pub fn near_identity_distance(f: &IntervalMap, n: usize) -> f64 {
    (0..n).map(|i| (f.derivative(i as f64 / (n - 1) as f64) - 1.0).abs()).fold(0.0, f64::max)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompositionVerdict {
    pub residual: f64,
    pub bound: f64,
    /// Rounding allowance added to the bound.
    pub allowance: f64,
    pub max_displacement: f64,
    pub eta: f64,
    pub delta: f64,
    pub pass: bool,
}

fn rounding_allowance(k: usize, x: f64) -> f64 {
    4.0 * (k as f64 + 1.0) * f64::EPSILON * x.abs().max(1.0)
}

pub fn composition_estimate_test(
    maps: &[IntervalMap],
    signs: &[i8],
    x: f64,
    eta: f64,
    delta: f64,
) -> Result<CompositionVerdict, DynamicsError> {
    if maps.is_empty() || maps.len() != signs.len() {
        return Err(DynamicsError::Precondition("need one sign per map and at least one map".into()));
    }
    if signs.iter().any(|&s| s != 1 && s != -1) {
        return Err(DynamicsError::Precondition("signs must be +1 or -1".into()));
    }
    for (i, f) in maps.iter().enumerate() {
        let dist = near_identity_distance(f, 1000);
        if dist >= delta {
            return Err(DynamicsError::Precondition(format!("map {i} has sup|Df-1| = {dist:e} >= delta = {delta:e}")));
        }
    }
    let mut y = x;
    let mut linear = 0.0;
    let mut max_displacement: f64 = 0.0;
    for (f, &s) in maps.iter().zip(signs) {
        y = if s > 0 { f.eval(y) } else { f.eval_inverse(y) };
        let disp = f.eval(x) - x;
        linear += s as f64 * disp;
        max_displacement = max_displacement.max(disp.abs());
    }
    let residual = ((y - x) - linear).abs();
    let bound = eta * max_displacement;
    let allowance = rounding_allowance(maps.len(), x);
    Ok(CompositionVerdict {
        residual,
        bound,
        allowance,
        max_displacement,
        eta,
        delta,
        pass: residual <= bound + allowance,
    })
}

/// `x + Σ c_j sin(π m_j x)/(π m_j)` with `Σ |c_j| < delta`; fixes 0 and 1.
pub fn random_near_identity_map<R: Rng>(rng: &mut R, delta: f64) -> IntervalMap {
    let terms = rng.gen_range(1..=3);
    let mut c: Vec<f64> = (0..terms).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let m: Vec<f64> = (0..terms).map(|_| rng.gen_range(1..=6) as f64).collect();
    let total: f64 = c.iter().map(|x: &f64| x.abs()).sum::<f64>().max(1e-300);
    let scale = delta * rng.gen_range(0.5..0.999) / total;
    c.iter_mut().for_each(|x| *x *= scale);
    let (c2, m2) = (c.clone(), m.clone());
    let f = move |x: f64| x + c.iter().zip(&m).map(|(c, m)| c * (PI * m * x).sin() / (PI * m)).sum::<f64>();
    let df = move |x: f64| 1.0 + c2.iter().zip(&m2).map(|(c, m)| c * (PI * m * x).cos()).sum::<f64>();
    let (f2, df2) = (f.clone(), df.clone());
    let inv = move |y: f64| {
        if y <= 0.0 || y >= 1.0 {
            return y;
        }
        let (mut lo, mut hi, mut x) = (0.0, 1.0, y);
        for _ in 0..100 {
            let g = f2(x) - y;
            if g == 0.0 {
                return x;
            }
            if g < 0.0 {
                lo = x;
            } else {
                hi = x;
            }
            let nx = x - g / df2(x);
            let next = if nx > lo && nx < hi { nx } else { 0.5 * (lo + hi) };
            if next == x {
                break;
            }
            x = next;
        }
        x
    };
    IntervalMap::new(Domain::Unit, "random-near-identity", f).with_derivative(df).with_inverse(inv)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HarnessReport {
    pub trials: usize,
    pub violations: usize,
    pub mixed_sign_trials: usize,
    pub k_max: usize,
    pub eta: f64,
    pub seed: u64,
    /// Largest residual / (bound + allowance) seen.
    pub max_ratio: f64,
    pub delta_by_length: Vec<f64>,
}

/// Randomized trials of the composition estimate with words of length
/// `1..=k_max` and random signs, each at its calibrated radius.
pub fn composition_harness(trials: usize, seed: u64, eta: f64, k_max: usize) -> Result<HarnessReport, DynamicsError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let delta_by_length: Vec<f64> = (1..=k_max).map(|k| calibrated_delta(k, eta)).collect();
    let mut violations = 0;
    let mut mixed = 0;
    let mut max_ratio: f64 = 0.0;
    for _ in 0..trials {
        let k = rng.gen_range(1..=k_max);
        let delta = delta_by_length[k - 1];
        let maps: Vec<IntervalMap> = (0..k).map(|_| random_near_identity_map(&mut rng, delta)).collect();
        let signs: Vec<i8> = (0..k).map(|_| if rng.gen_bool(0.5) { 1 } else { -1 }).collect();
        if signs.contains(&1) && signs.contains(&-1) {
            mixed += 1;
        }
        let x = rng.gen_range(0.01..0.99);
        let v = composition_estimate_test(&maps, &signs, x, eta, delta)?;
        max_ratio = max_ratio.max(v.residual / (v.bound + v.allowance));
        if !v.pass {
            violations += 1;
        }
    }
    Ok(HarnessReport { trials, violations, mixed_sign_trials: mixed, k_max, eta, seed, max_ratio, delta_by_length })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlowRootReport {
    pub q: u32,
    pub points: usize,
    pub violations: usize,
    pub max_ratio: f64,
    pub eta: f64,
    /// Largest `|t|` used; `|t|/q` keeps `ξ^{t/q}` within the calibrated radius.
    pub max_time: f64,
}

/// Checks `|(f(x)-x) - q(f^{1/q}(x)-x)| ≤ η |f^{1/q}(x)-x|` for `f = ξ^t` the
/// logistic flow and random `x`, `t`.
pub fn flow_root_check(q: u32, points: usize, seed: u64, eta: f64) -> FlowRootReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (q as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let delta = calibrated_delta(q as usize, eta);
    let max_time = q as f64 * (0.999 * delta).ln_1p();
    let mut violations = 0;
    let mut max_ratio: f64 = 0.0;
    for _ in 0..points {
        let t = max_time * rng.gen_range(0.05..1.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let x = rng.gen_range(0.01..0.99);
        let root = logistic_flow(t / q as f64, x) - x;
        let full = logistic_flow(t, x) - x;
        let residual = (full - q as f64 * root).abs();
        let bound = eta * root.abs() + rounding_allowance(q as usize, x);
        max_ratio = max_ratio.max(residual / bound);
        if residual > bound {
            violations += 1;
        }
    }
    FlowRootReport { q, points, violations, max_ratio, eta, max_time }
}
