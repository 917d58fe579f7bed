use serde::Serialize;

use super::action::GroupAction;
use super::map::{Domain, IntervalMap};
use super::{DynamicsError, Tolerances};
use crate::affinerep::AffineRepresentation;
use crate::groupcore::GroupElement;

/// Central differences at `h, h/2, h/4`-type steps with two rounds of
/// Richardson extrapolation.
pub fn richardson_derivative(f: impl Fn(f64) -> f64, x: f64, steps: [f64; 3]) -> f64 {
    let d = |h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
    let (d0, d1, d2) = (d(steps[0]), d(steps[1]), d(steps[2]));
    let r1 = (steps[0] / steps[1]).powi(2);
    let r2 = (steps[1] / steps[2]).powi(2);
    let e1 = (r1 * d1 - d0) / (r1 - 1.0);
    let e2 = (r2 * d2 - d1) / (r2 - 1.0);
    let r = r1 * r2;
    (r * e2 - e1) / (r - 1.0)
}

/// Leftmost sign change of `f(x) - x` on a uniform grid of `(lo, hi)`,
/// refined by bisection to `width`.
pub fn locate_fixed_point(f: &IntervalMap, lo: f64, hi: f64, grid: usize, width: f64) -> Result<f64, DynamicsError> {
    let xs: Vec<f64> = (1..grid).map(|i| lo + (hi - lo) * i as f64 / grid as f64).collect();
    let g = |x: f64| f.eval(x) - x;
    let mut prev: Option<(f64, f64)> = None;
    for &x in &xs {
        let gx = g(x);
        if gx == 0.0 {
            return Ok(x);
        }
        if let Some((px, pg)) = prev {
            if pg.signum() != gx.signum() {
                let (mut a, mut b) = (px, x);
                let sa = pg.signum();
                while b - a > width {
                    let m = 0.5 * (a + b);
                    if m <= a || m >= b {
                        break;
                    }
                    let gm = g(m);
                    if gm == 0.0 {
                        return Ok(m);
                    }
                    if gm.signum() == sa {
                        a = m;
                    } else {
                        b = m;
                    }
                }
                return Ok(0.5 * (a + b));
            }
        }
        prev = Some((x, gx));
    }
    Err(DynamicsError::NoInteriorFixedPoint)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MultiplierAudit {
    pub element: GroupElement,
    pub fixed_point: f64,
    pub measured: f64,
    pub expected: f64,
    pub error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Measures the derivative of `ψ(g)` at its interior fixed point and compares
/// it with `λ^k`.
pub fn multiplier_audit(
    action: &dyn GroupAction,
    g: &GroupElement,
    rep: &AffineRepresentation,
    tol: &Tolerances,
) -> Result<MultiplierAudit, DynamicsError> {
    if g.k == 0 {
        return Err(DynamicsError::Precondition("g must have a nonzero power of a".into()));
    }
    let f = action.element(g)?;
    let (lo, hi) = match action.domain() {
        Domain::Unit => (0.0, 1.0),
        _ => (-1e3, 1e3),
    };
    let p = locate_fixed_point(&f, lo, hi, tol.grid, tol.fixed_point_width)?;
    let measured = richardson_derivative(|x| f.eval(x), p, tol.fd_steps);
    let expected = rep.lambda().pow(g.k).map_err(|e| DynamicsError::Precondition(e.to_string()))?.to_f64();
    let error = (measured - expected).abs();
    Ok(MultiplierAudit {
        element: g.clone(),
        fixed_point: p,
        measured,
        expected,
        error,
        tolerance: tol.derivative_tol,
        pass: error <= tol.derivative_tol,
    })
}
