//! Ghys–Sergiescu actions of `BS(1,n)` on the line.
//!
//! A base map `f` with `f(x+1) = f(x) + n` and `f(0) = 0` gives
//! `θ(p/n^q) = f^{-q} T_p f^q` and `ψ(a^k b^v) = f^k ∘ θ(v)`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::ConstructionError;
use crate::dynamics1d::{Domain, DynamicsError, GroupAction, IntervalMap};
use crate::exactmath::{Rational, RationalMatrix};
use crate::groupcore::{GroupContext, GroupElement};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum BaseRecipe {
    /// `f(x) = n x`.
    Linear,
    /// Cubic Hermite through `(0,0)`, `(1/2,1/2)`, `(1,n)` with slopes 2, 1/2, 2.
    TwoFixedPoints,
    /// Cubic Hermite through `[x, y, slope]` knots on `[0,1]`.
    Spline { knots: Vec<[f64; 3]> },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GsBase {
    pub n: u32,
    pub recipe: BaseRecipe,
    knots: Vec<[f64; 3]>,
    /// Roots of `f(x) - x` in `[0,1)`.
    pub fixed_points: Vec<f64>,
}

fn hermite(k0: &[f64; 3], k1: &[f64; 3], x: f64) -> (f64, f64) {
    let h = k1[0] - k0[0];
    let t = (x - k0[0]) / h;
    let (t2, t3) = (t * t, t * t * t);
    let v = (2.0 * t3 - 3.0 * t2 + 1.0) * k0[1]
        + (t3 - 2.0 * t2 + t) * h * k0[2]
        + (-2.0 * t3 + 3.0 * t2) * k1[1]
        + (t3 - t2) * h * k1[2];
    let d = (6.0 * t2 - 6.0 * t) * k0[1] / h
        + (3.0 * t2 - 4.0 * t + 1.0) * k0[2]
        + (-6.0 * t2 + 6.0 * t) * k1[1] / h
        + (3.0 * t2 - 2.0 * t) * k1[2];
    (v, d)
}

impl GsBase {
    pub fn new(n: u32, recipe: BaseRecipe) -> Result<Self, ConstructionError> {
        if n < 2 {
            return Err(ConstructionError::Precondition(format!("n must be at least 2, got {n}")));
        }
        let nf = n as f64;
        let knots = match &recipe {
            BaseRecipe::Linear => vec![[0.0, 0.0, nf], [1.0, nf, nf]],
            BaseRecipe::TwoFixedPoints => vec![[0.0, 0.0, 2.0], [0.5, 0.5, 0.5], [1.0, nf, 2.0]],
            BaseRecipe::Spline { knots } => knots.clone(),
        };
        if knots.len() < 2 || knots.iter().flatten().any(|v| !v.is_finite()) {
            return Err(ConstructionError::Precondition("spline needs at least two finite knots".into()));
        }
        if knots[0][0] != 0.0 || knots[knots.len() - 1][0] != 1.0 || knots.windows(2).any(|w| w[1][0] <= w[0][0]) {
            return Err(ConstructionError::Precondition("knot abscissae must increase from 0 to 1".into()));
        }
        if knots[0][1] != 0.0 {
            return Err(ConstructionError::Precondition("f(0) = 0 fails".into()));
        }
        if knots[knots.len() - 1][1] != nf {
            return Err(ConstructionError::Precondition(format!(
                "f(x+1) = f(x) + {n} fails: f(1) = {}",
                knots[knots.len() - 1][1]
            )));
        }
        let mut base = GsBase { n, recipe, knots, fixed_points: Vec::new() };
        let m = 10_000;
        let vals: Vec<f64> = (0..=m).map(|i| base.h(i as f64 / m as f64)).collect();
        if vals.windows(2).any(|w| w[1] <= w[0]) {
            return Err(ConstructionError::Precondition("base map is not increasing on [0,1]".into()));
        }
        base.fixed_points = base.find_fixed_points(m);
        Ok(base)
    }

    fn is_linear(&self) -> bool {
        matches!(self.recipe, BaseRecipe::Linear)
    }

    /// `f` on `[0,1]`.
    fn h(&self, u: f64) -> f64 {
        self.h_with_derivative(u).0
    }

    fn h_with_derivative(&self, u: f64) -> (f64, f64) {
        if self.is_linear() {
            return (self.n as f64 * u, self.n as f64);
        }
        let i = self.knots.partition_point(|k| k[0] <= u).clamp(1, self.knots.len() - 1);
        hermite(&self.knots[i - 1], &self.knots[i], u)
    }

    fn h_inverse(&self, r: f64) -> f64 {
        if self.is_linear() {
            return r / self.n as f64;
        }
        let i = self.knots.partition_point(|k| k[1] <= r).clamp(1, self.knots.len() - 1);
        let (k0, k1) = (&self.knots[i - 1], &self.knots[i]);
        let (mut lo, mut hi) = (k0[0], k1[0]);
        let mut x = lo + (hi - lo) * ((r - k0[1]) / (k1[1] - k0[1])).clamp(0.0, 1.0);
        for _ in 0..100 {
            let (v, d) = hermite(k0, k1, x);
            let g = v - r;
            if g == 0.0 {
                return x;
            }
            if g < 0.0 {
                lo = x;
            } else {
                hi = x;
            }
            let nx = x - g / d;
            let next = if nx > lo && nx < hi && nx.is_finite() { nx } else { 0.5 * (lo + hi) };
            if next == x || hi - lo <= f64::EPSILON * hi.abs().max(1e-300) {
                break;
            }
            x = next;
        }
        x
    }

    pub fn eval(&self, x: f64) -> f64 {
        if self.is_linear() {
            return self.n as f64 * x;
        }
        let m = x.floor();
        self.n as f64 * m + self.h(x - m)
    }

    pub fn eval_inverse(&self, y: f64) -> f64 {
        if self.is_linear() {
            return y / self.n as f64;
        }
        let nf = self.n as f64;
        let m = (y / nf).floor();
        let r = (y - nf * m).clamp(0.0, nf);
        m + self.h_inverse(r)
    }

    pub fn derivative(&self, x: f64) -> f64 {
        self.h_with_derivative(x - x.floor()).1
    }

    /// `f^k(x)` for any integer `k`.
    pub fn iterate(&self, k: i64, mut x: f64) -> f64 {
        for _ in 0..k.unsigned_abs() {
            x = if k > 0 { self.eval(x) } else { self.eval_inverse(x) };
        }
        x
    }

    pub fn map(&self) -> IntervalMap {
        let (a, b, c) = (self.clone(), self.clone(), self.clone());
        IntervalMap::new(Domain::Line, format!("gs-base(n={})", self.n), move |x| a.eval(x))
            .with_inverse(move |y| b.eval_inverse(y))
            .with_derivative(move |x| c.derivative(x))
    }

    /// `sup |f(x+1) - f(x) - n|` on `[-2, 2]`.
    pub fn condition_residual(&self, points: usize) -> f64 {
        (0..points)
            .map(|i| -2.0 + 4.0 * i as f64 / (points - 1) as f64)
            .map(|x| (self.eval(x + 1.0) - self.eval(x) - self.n as f64).abs())
            .fold(0.0, f64::max)
    }

    fn find_fixed_points(&self, m: usize) -> Vec<f64> {
        let g = |u: f64| self.h(u) - u;
        let mut out = vec![0.0];
        let mut prev = (1.0 / m as f64, g(1.0 / m as f64));
        for i in 2..m {
            let u = i as f64 / m as f64;
            let gu = g(u);
            if gu == 0.0 {
                out.push(u);
            } else if prev.1 != 0.0 && gu.signum() != prev.1.signum() {
                let (mut lo, mut hi) = (prev.0, u);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if g(mid).signum() == prev.1.signum() {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                out.push(0.5 * (lo + hi));
            }
            prev = (u, gu);
        }
        out
    }
}

/// `ψ: BS(1,n) → Homeo₊(R)` from a base map.
#[derive(Clone, Debug)]
pub struct GsAction {
    ctx: GroupContext,
    base: Arc<GsBase>,
}

pub fn gs_build(n: u32, recipe: BaseRecipe) -> Result<GsAction, ConstructionError> {
    let base = GsBase::new(n, recipe)?;
    let ctx = GroupContext::new(RationalMatrix::from_i64(&[&[n as i64]]))?;
    Ok(GsAction { ctx, base: Arc::new(base) })
}

/// Writes `v = p/n^q` with `q` minimal, if `v` is `n`-adic and `p` fits in 2^53.
pub fn nadic_encoding(v: &Rational, n: u32) -> Option<(i64, u32)> {
    let nb = BigInt::from(n);
    let mut den = v.denom().clone();
    let mut q = 0u32;
    while !den.is_one() {
        let g = den.gcd(&nb);
        if g.is_one() || q > 60 {
            return None;
        }
        den /= g;
        q += 1;
    }
    // den | n^q; rescale numerator to n^q.
    let scale = num_traits::pow(nb, q as usize) / v.denom();
    let p = v.numer() * scale;
    if p.abs() > BigInt::from(1i64 << 53) {
        return None;
    }
    Some((p.to_i64()?, q))
}

impl GsAction {
    pub fn base(&self) -> &GsBase {
        &self.base
    }

    pub fn n(&self) -> u32 {
        self.base.n
    }

    /// `f^{-q}(f^q(x) + p)`.
    pub fn theta(&self, p: i64, q: u32, x: f64) -> f64 {
        let b = &self.base;
        b.iterate(-(q as i64), b.iterate(q as i64, x) + p as f64)
    }

    /// `sup |f^{-(q+1)} T_{np} f^{q+1} - f^{-q} T_p f^q|` on the grid.
    pub fn well_definedness_residual(&self, p: i64, q: u32, grid: &[f64]) -> f64 {
        let n = self.n() as i64;
        grid.iter().map(|&x| (self.theta(n * p, q + 1, x) - self.theta(p, q, x)).abs()).fold(0.0, f64::max)
    }
}

impl GroupAction for GsAction {
    fn context(&self) -> &GroupContext {
        &self.ctx
    }

    fn domain(&self) -> Domain {
        Domain::Line
    }

    fn element(&self, g: &GroupElement) -> Result<IntervalMap, DynamicsError> {
        if g.v.len() != 1 {
            return Err(DynamicsError::InvalidElement(format!("expected 1 coordinate, got {}", g.v.len())));
        }
        let (p, q) = if g.v[0].is_zero() {
            (0, 0)
        } else {
            nadic_encoding(&g.v[0], self.n())
                .ok_or_else(|| DynamicsError::InvalidElement(format!("{} is not {}-adic with |p| < 2^53", g.v[0], self.n())))?
        };
        let k = g.k;
        let (a, b) = (self.clone(), self.clone());
        Ok(IntervalMap::new(Domain::Line, self.name(), move |x| a.base.iterate(k, a.theta(p, q, x)))
            .with_inverse(move |y| b.theta(-p, q, b.base.iterate(-k, y))))
    }

    fn name(&self) -> String {
        format!("gs(n={})", self.n())
    }
}
