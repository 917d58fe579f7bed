//! One-parameter flows on `[0,1]`.
//!
//! The bump flow integrates `X(u) = 1/ζ'(u)` with `ζ(u) = e^{1/(1-u)} - e^{1/u}`,
//! so `ξ^c(u) = ζ⁻¹(ζ(u) + c)`. `X` is flat at both ends.

use super::map::{Domain, IntervalMap};

/// Time-`t` map of `x' = x(1-x)`.
pub fn logistic_flow(t: f64, x: f64) -> f64 {
    let e = t.exp();
    x * e / (1.0 - x + x * e)
}

pub fn logistic_flow_map(t: f64) -> IntervalMap {
    IntervalMap::new(Domain::Unit, format!("logistic-flow({t})"), move |x| logistic_flow(t, x))
        .with_inverse(move |x| logistic_flow(-t, x))
        .with_derivative(move |x| {
            let e = t.exp();
            let d = 1.0 - x + x * e;
            e / (d * d)
        })
}

/// `sup_{[0,1]} |Dξ^t - 1|` for the logistic flow.
pub fn logistic_flow_c1_distance(t: f64) -> f64 {
    t.abs().exp_m1()
}

pub fn zeta(u: f64) -> f64 {
    (1.0 / (1.0 - u)).exp() - (1.0 / u).exp()
}

/// `X(u) = 1/ζ'(u)`.
pub fn bump_field(u: f64) -> f64 {
    if u <= 0.0 || u >= 1.0 {
        return 0.0;
    }
    let (a, b) = (1.0 / (1.0 - u), 1.0 / u);
    let dz = a.exp() * a * a + b.exp() * b * b;
    if dz.is_finite() {
        1.0 / dz
    } else {
        0.0
    }
}

fn zeta_inverse(z: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let m = 0.5 * (lo + hi);
        if m <= lo || m >= hi {
            break;
        }
        if zeta(m) < z {
            lo = m;
        } else {
            hi = m;
        }
    }
    0.5 * (lo + hi)
}

/// `ξ^c(u)`.
pub fn bump_flow(c: f64, u: f64) -> f64 {
    if c == 0.0 || u <= 0.0 || u >= 1.0 {
        return u;
    }
    let z = zeta(u);
    if !z.is_finite() {
        // |X(u)| is below e^{-700}: the point does not move in binary64.
        return u;
    }
    let target = z + c;
    if target == z {
        return u;
    }
    zeta_inverse(target)
}

/// `Dξ^c(u) = X(ξ^c(u)) / X(u)`.
pub fn bump_flow_derivative(c: f64, u: f64) -> f64 {
    let x = bump_field(u);
    if x == 0.0 {
        return 1.0;
    }
    bump_field(bump_flow(c, u)) / x
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rk4(c: f64, u0: f64, h: f64) -> f64 {
        let n = (c.abs() / h).round() as usize;
        let h = c / n as f64;
        let mut u = u0;
        for _ in 0..n {
            let k1 = bump_field(u);
            let k2 = bump_field(u + 0.5 * h * k1);
            let k3 = bump_field(u + 0.5 * h * k2);
            let k4 = bump_field(u + h * k3);
            u += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        u
    }

    #[test]
    fn closed_form_matches_integration() {
        for &c in &[0.5, -0.7, 2.0] {
            for &u in &[0.1, 0.35, 0.5, 0.8] {
                let a = bump_flow(c, u);
                let b = rk4(c, u, 1e-4);
                assert!((a - b).abs() < 1e-10, "c={c} u={u}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn flow_property_and_flat_ends() {
        for &u in &[0.01, 0.2, 0.5, 0.77, 0.99] {
            let lhs = bump_flow(0.3, bump_flow(-1.1, u));
            let rhs = bump_flow(-0.8, u);
            assert!((lhs - rhs).abs() < 1e-14);
            assert!((bump_flow(1.0, bump_flow(-1.0, u)) - u).abs() < 1e-15);
        }
        assert!(bump_field(0.01) < 1e-40 && bump_field(0.999) < 1e-40);
        let h = 1e-6;
        let d = (bump_flow(0.4, 0.3 + h) - bump_flow(0.4, 0.3 - h)) / (2.0 * h);
        assert!((d - bump_flow_derivative(0.4, 0.3)).abs() < 1e-6);
    }

    #[test]
    fn logistic_flow_group_law() {
        let f = logistic_flow_map(0.3);
        assert!(f.check(1000).ok);
        assert!((logistic_flow(0.1, logistic_flow(0.2, 0.4)) - logistic_flow(0.3, 0.4)).abs() < 1e-15);
        let sup = (0..=1000).map(|i| (f.derivative(i as f64 / 1000.0) - 1.0).abs()).fold(0.0, f64::max);
        assert!((sup - logistic_flow_c1_distance(0.3)).abs() < 1e-12);
    }
}
