//! Charts `φ: R → (0,1)` used to move affine actions onto the interval.
//!
//! The flat chart is `φ(x) = (1 + tanh(x)(1 - 1/(2E(x))))/2` with
//! `E(x) = ln(e + x²)`. Near the ends `1 - φ(x) ≈ 1/(8 ln|x|)`, so
//! conjugates of affine maps are tangent to the identity at 0 and 1. Points
//! that close to the ends correspond to `|x|` far beyond binary64 range, so
//! they are carried as `ln|x|`.

use std::f64::consts::{E, LN_2};

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Chart {
    Logistic,
    MtFlat,
}

const X_TAIL: f64 = 40.0;

/// A real number, stored as `sign·exp(log_abs)` when too large to hold.
#[derive(Clone, Copy, Debug)]
enum Coord {
    Plain(f64),
    Log { sign: f64, log_abs: f64 },
}

fn flat_e(x: f64) -> f64 {
    if x.abs() > 1e150 {
        2.0 * x.abs().ln() + (E / (x * x)).ln_1p()
    } else {
        (E + x * x).ln()
    }
}

fn flat_e_log(log_abs: f64) -> f64 {
    2.0 * log_abs + (E * (-2.0 * log_abs).exp()).ln_1p()
}

/// Distance `min(φ, 1-φ)` for `x ≥ 0`.
fn flat_gap(x: f64) -> f64 {
    let ax = x.abs();
    let e = flat_e(ax);
    1.0 / ((2.0 * ax).exp() + 1.0) + ax.tanh() / (4.0 * e)
}

fn flat_tail_threshold() -> f64 {
    flat_gap(X_TAIL)
}

impl Chart {
    pub fn name(&self) -> &'static str {
        match self {
            Chart::Logistic => "logistic",
            Chart::MtFlat => "mt-flat",
        }
    }

    pub fn forward(&self, x: f64) -> f64 {
        match self {
            Chart::Logistic => {
                if x >= 0.0 {
                    1.0 / (1.0 + (-x).exp())
                } else {
                    let e = x.exp();
                    e / (1.0 + e)
                }
            }
            Chart::MtFlat => {
                if x.is_infinite() {
                    return if x > 0.0 { 1.0 } else { 0.0 };
                }
                let m = flat_gap(x);
                if x >= 0.0 {
                    1.0 - m
                } else {
                    m
                }
            }
        }
    }

    pub fn inverse(&self, u: f64) -> f64 {
        match self.coord(u) {
            Coord::Plain(x) => x,
            Coord::Log { sign, log_abs } => sign * log_abs.exp(),
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        self.ln_derivative(Coord::Plain(x)).exp()
    }

    fn coord(&self, u: f64) -> Coord {
        if u <= 0.0 {
            return Coord::Plain(f64::NEG_INFINITY);
        }
        if u >= 1.0 {
            return Coord::Plain(f64::INFINITY);
        }
        match self {
            Chart::Logistic => Coord::Plain(u.ln() - (-u).ln_1p()),
            Chart::MtFlat => {
                let sign = if u >= 0.5 { 1.0 } else { -1.0 };
                let m = if u >= 0.5 { 1.0 - u } else { u };
                if m < flat_tail_threshold() {
                    let e = 1.0 / (4.0 * m);
                    let log_abs = 0.5 * (e + (-(1.0 - e).exp()).ln_1p());
                    Coord::Log { sign, log_abs }
                } else {
                    Coord::Plain(sign * flat_solve(m))
                }
            }
        }
    }

    fn forward_coord(&self, c: Coord) -> f64 {
        match c {
            Coord::Plain(x) => self.forward(x),
            Coord::Log { sign, log_abs } => {
                let m = 1.0 / (4.0 * flat_e_log(log_abs));
                if sign > 0.0 {
                    1.0 - m
                } else {
                    m
                }
            }
        }
    }

    fn ln_derivative(&self, c: Coord) -> f64 {
        match (self, c) {
            (Chart::Logistic, Coord::Plain(x)) => {
                let p = self.forward(x);
                let q = self.forward(-x);
                p.ln() + q.ln()
            }
            (Chart::MtFlat, Coord::Plain(x)) if x.abs() <= 1e150 => {
                let e = flat_e(x);
                let sech2 = if x.abs() > 350.0 { 0.0 } else { 1.0 / x.cosh().powi(2) };
                let s = sech2 * (1.0 - 0.5 / e) + x.tanh() * x / (e * e * (E + x * x));
                (0.5 * s).ln()
            }
            (_, Coord::Plain(x)) => -LN_2 - x.abs().ln() - 2.0 * flat_e(x).ln(),
            (_, Coord::Log { log_abs, .. }) => -LN_2 - log_abs - 2.0 * flat_e_log(log_abs).ln(),
        }
    }

    /// `φ(slope·φ⁻¹(u) + offset)` for `slope > 0`.
    pub fn conjugate_affine(&self, slope: f64, offset: f64, u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        if u >= 1.0 {
            return 1.0;
        }
        self.forward_coord(self.push_affine(slope, offset, self.coord(u)))
    }

    /// Derivative of [`conjugate_affine`](Self::conjugate_affine) in `u`.
    pub fn conjugate_affine_derivative(&self, slope: f64, offset: f64, u: f64) -> f64 {
        if u <= 0.0 || u >= 1.0 {
            // Logistic conjugates behave like e^{±offset}·u^slope at the ends.
            return match self {
                Chart::Logistic if slope > 1.0 => 0.0,
                Chart::Logistic if slope < 1.0 => f64::INFINITY,
                Chart::Logistic if u <= 0.0 => offset.exp(),
                Chart::Logistic => (-offset).exp(),
                Chart::MtFlat => 1.0,
            };
        }
        let x = self.coord(u);
        let y = self.push_affine(slope, offset, x);
        if let (Coord::Log { log_abs: lx, .. }, Coord::Log { log_abs: ly, .. }) = (x, y) {
            if lx > 30.0 {
                // ln|y| - ln|x| is known without cancellation; E ≈ 2 ln|·| here.
                let r = (offset / slope) * x_sign(x) * (-lx).exp();
                let dl = slope.ln() + r.ln_1p();
                let ex = flat_e_log(lx);
                let ey = ex + 2.0 * dl;
                debug_assert!((ly - lx - dl).abs() <= 1e-6 * ly);
                return (ex / ey).powi(2) / (1.0 + r);
            }
        }
        slope * (self.ln_derivative(y) - self.ln_derivative(x)).exp()
    }

    fn push_affine(&self, slope: f64, offset: f64, c: Coord) -> Coord {
        match c {
            Coord::Plain(x) => {
                let y = slope * x + offset;
                if y.is_finite() || x.is_infinite() {
                    Coord::Plain(y)
                } else {
                    Coord::Log { sign: x.signum(), log_abs: slope.ln() + x.abs().ln() }
                }
            }
            Coord::Log { sign, log_abs } => {
                let r = (offset / slope) * sign * (-log_abs).exp();
                if r.abs() < 0.5 {
                    let ly = slope.ln() + log_abs + r.ln_1p();
                    if ly > X_TAIL.ln() {
                        Coord::Log { sign, log_abs: ly }
                    } else {
                        Coord::Plain(sign * ly.exp())
                    }
                } else {
                    Coord::Plain(slope * sign * log_abs.exp() + offset)
                }
            }
        }
    }
}

fn x_sign(c: Coord) -> f64 {
    match c {
        Coord::Plain(x) => x.signum(),
        Coord::Log { sign, .. } => sign,
    }
}

/// Solves `flat_gap(x) = m` for `x ∈ [0, X_TAIL]`.
fn flat_solve(m: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, X_TAIL);
    let mut x = 1.0;
    for _ in 0..200 {
        let g = flat_gap(x) - m;
        if g > 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        if g == 0.0 || hi - lo <= 1e-15 * (1.0 + x.abs()) {
            return x;
        }
        let nx = x + g / Chart::MtFlat.derivative(x);
        let next = if nx > lo && nx < hi && nx.is_finite() { nx } else { 0.5 * (lo + hi) };
        if next == x {
            return x;
        }
        x = next;
    }
    x
}
