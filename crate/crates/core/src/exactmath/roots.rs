//! Real-root counting and isolation with Sturm sequences, plus a binary64
//! simultaneous root finder used to seed factor candidates and eigen-splittings.

use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::poly::Poly;
use super::rational::{format_rational, ratio, serde_rational, to_f64, Rational};
use super::ExactError;

/// Width below which isolating intervals are considered refined (2^-64).
pub fn refinement_width() -> Rational {
    Rational::new(1.into(), num_bigint::BigInt::one() << 64usize)
}

pub fn sturm_sequence(p: &Poly) -> Vec<Poly> {
    let mut seq = vec![p.clone(), p.derivative()];
    while let Some(last) = seq.last() {
        if last.is_zero() {
            seq.pop();
            break;
        }
        let prev = &seq[seq.len() - 2];
        let r = prev.rem(last).expect("nonzero");
        if r.is_zero() {
            break;
        }
        seq.push(-&r);
    }
    seq
}

fn sign_changes(seq: &[Poly], x: &Rational) -> usize {
    let signs: Vec<i8> = seq
        .iter()
        .map(|q| {
            let v = q.eval(x);
            if v.is_positive() {
                1
            } else if v.is_negative() {
                -1
            } else {
                0
            }
        })
        .filter(|&s| s != 0)
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Number of distinct real roots of the squarefree polynomial `p` in the open
/// interval `(lo, hi)`.
pub fn sturm_count(p: &Poly, lo: &Rational, hi: &Rational) -> Result<usize, ExactError> {
    if p.is_zero() {
        return Err(ExactError::ZeroPolynomial);
    }
    if lo >= hi {
        return Err(ExactError::EmptyInterval);
    }
    for e in [lo, hi] {
        if p.eval(e).is_zero() {
            return Err(ExactError::EndpointRoot(format_rational(e)));
        }
    }
    let seq = sturm_sequence(p);
    Ok(sign_changes(&seq, lo) - sign_changes(&seq, hi))
}

/// A rational interval containing exactly one real root of `poly`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsolatingInterval {
    #[serde(with = "serde_rational")]
    pub lo: Rational,
    #[serde(with = "serde_rational")]
    pub hi: Rational,
}

impl IsolatingInterval {
    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / Rational::from_integer(2.into())
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn midpoint_f64(&self) -> f64 {
        to_f64(&self.midpoint())
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo < x && x < &self.hi
    }
}

/// Isolates every real root of the squarefree, nonconstant `p` inside `(lo, hi)`,
/// returning intervals in increasing order. Endpoints of returned intervals are
/// never roots.
pub fn isolate_real_roots_in(
    p: &Poly,
    lo: &Rational,
    hi: &Rational,
) -> Result<Vec<IsolatingInterval>, ExactError> {
    let seq = sturm_sequence(p);
    let mut out = Vec::new();
    let mut stack = vec![(lo.clone(), hi.clone())];
    while let Some((a, b)) = stack.pop() {
        let n = sign_changes(&seq, &a) - sign_changes(&seq, &b);
        match n {
            0 => {}
            1 => out.push(IsolatingInterval { lo: a, hi: b }),
            _ => {
                let m = (&a + &b) / Rational::from_integer(2.into());
                if p.eval(&m).is_zero() {
                    // Rational root: carve out a tiny interval around it.
                    let eps = tiny_radius(p, &m, &a, &b);
                    stack.push((&m + &eps, b));
                    out.push(IsolatingInterval { lo: &m - &eps, hi: &m + &eps });
                    stack.push((a, &m - &eps));
                } else {
                    stack.push((m.clone(), b));
                    stack.push((a, m));
                }
            }
        }
    }
    out.sort_by(|x, y| x.lo.cmp(&y.lo));
    Ok(out)
}

/// All real roots of a squarefree nonconstant polynomial.
pub fn isolate_real_roots(p: &Poly) -> Result<Vec<IsolatingInterval>, ExactError> {
    if p.is_constant() {
        return Ok(Vec::new());
    }
    let b = p.cauchy_bound();
    let b = &b + Rational::one();
    isolate_real_roots_in(p, &-b.clone(), &b)
}

fn tiny_radius(p: &Poly, r: &Rational, a: &Rational, b: &Rational) -> Rational {
    let mut eps = (b - a) / Rational::from_integer(4.into());
    let four = Rational::from_integer(4.into());
    let seq = sturm_sequence(p);
    loop {
        let lo = r - &eps;
        let hi = r + &eps;
        if !p.eval(&lo).is_zero()
            && !p.eval(&hi).is_zero()
            && sign_changes(&seq, &lo) - sign_changes(&seq, &hi) == 1
        {
            return eps;
        }
        eps /= &four;
    }
}

/// Bisects an isolating interval of the squarefree `p` until its width drops
/// below `width`.
pub fn refine(
    p: &Poly,
    iv: &IsolatingInterval,
    width: &Rational,
) -> Result<IsolatingInterval, ExactError> {
    let (mut lo, mut hi) = (iv.lo.clone(), iv.hi.clone());
    let mut s_lo = p.eval(&lo).signum();
    if s_lo.is_zero() || p.eval(&hi).is_zero() {
        return Err(ExactError::EndpointRoot(format_rational(&lo)));
    }
    let two = Rational::from_integer(2.into());
    while &(&hi - &lo) >= width {
        let m = (&lo + &hi) / &two;
        let v = p.eval(&m);
        if v.is_zero() {
            // Exact rational root: shrink symmetrically around it.
            let q = (&hi - &lo) / Rational::from_integer(8.into());
            let (l, h) = (&m - &q, &m + &q);
            if p.eval(&l).is_zero() || p.eval(&h).is_zero() {
                return Err(ExactError::EndpointRoot(format_rational(&m)));
            }
            lo = l;
            hi = h;
            s_lo = p.eval(&lo).signum();
            continue;
        }
        if v.signum() == s_lo {
            lo = m;
        } else {
            hi = m;
        }
    }
    Ok(IsolatingInterval { lo, hi })
}

/// Interval of width `< 2^-70` around a known rational root.
pub fn rational_root_interval(r: &Rational) -> IsolatingInterval {
    let eps = ratio(1, 1) / Rational::from_integer(num_bigint::BigInt::one() << 70usize);
    IsolatingInterval { lo: r - &eps, hi: r + &eps }
}

/// All complex roots (with multiplicity) of a polynomial with binary64
/// coefficients by the Aberth–Ehrlich iteration followed by Newton polishing.
pub fn complex_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let mut c: Vec<f64> = coeffs.to_vec();
    while c.last() == Some(&0.0) {
        c.pop();
    }
    let n = c.len().saturating_sub(1);
    if n == 0 {
        return Vec::new();
    }
    let lc = c[n];
    let monic: Vec<Complex64> = c.iter().map(|x| Complex64::new(x / lc, 0.0)).collect();
    let radius = 1.0 + monic[..n].iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let th = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64 + 0.4;
            Complex64::from_polar(radius * 0.5 + 0.1 * k as f64 / n as f64, th)
        })
        .collect();
    let eval = |x: Complex64| -> (Complex64, Complex64) {
        let mut p = Complex64::zero();
        let mut dp = Complex64::zero();
        for a in monic.iter().rev() {
            dp = dp * x + p;
            p = p * x + a;
        }
        (p, dp)
    };
    for _ in 0..2000 {
        let mut max_step: f64 = 0.0;
        for i in 0..n {
            let (p, dp) = eval(z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let sum: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| {
                    let d = z[i] - z[j];
                    if d.norm() == 0.0 {
                        Complex64::zero()
                    } else {
                        d.inv()
                    }
                })
                .sum();
            let denom = Complex64::one() - ratio * sum;
            let step = if denom.norm() == 0.0 { ratio } else { ratio / denom };
            z[i] -= step;
            max_step = max_step.max(step.norm() / (1.0 + z[i].norm()));
        }
        if max_step < 1e-16 {
            break;
        }
    }
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = eval(*zi);
            if dp.norm() == 0.0 {
                break;
            }
            let nz = *zi - p / dp;
            if !nz.re.is_finite() || !nz.im.is_finite() {
                break;
            }
            if eval(nz).0.norm() <= p.norm() {
                *zi = nz;
            } else {
                break;
            }
        }
    }
    z.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    z
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::rational::rat;

    #[test]
    fn sturm_count_examples() {
        let p = Poly::from_i64(&[-2, 0, 1]);
        assert_eq!(sturm_count(&p, &rat(0), &rat(2)).unwrap(), 1);
        // y^2 + 4y + 2 has roots -2 ± √2; only -2 + √2 lies in (-2, 2).
        let q = Poly::from_i64(&[2, 4, 1]);
        assert_eq!(sturm_count(&q, &rat(-2), &rat(2)).unwrap(), 1);
        let oracle = [-2.0 + 2f64.sqrt(), -2.0 - 2f64.sqrt()];
        assert_eq!(oracle.iter().filter(|&&r| r > -2.0 && r < 2.0).count(), 1);
        let l = Poly::from_i64(&[-2, 1]);
        assert_eq!(sturm_count(&l, &rat(3), &rat(4)).unwrap(), 0);
    }

    #[test]
    fn endpoint_root_is_reported() {
        let l = Poly::from_i64(&[-2, 1]);
        assert!(matches!(sturm_count(&l, &rat(2), &rat(4)), Err(ExactError::EndpointRoot(_))));
        assert!(matches!(sturm_count(&l, &rat(4), &rat(2)), Err(ExactError::EmptyInterval)));
    }

    #[test]
    fn isolation_with_rational_roots() {
        // (x-1)(x-2)(x^2-2)
        let p = &(&Poly::from_i64(&[-1, 1]) * &Poly::from_i64(&[-2, 1])) * &Poly::from_i64(&[-2, 0, 1]);
        let ivs = isolate_real_roots(&p).unwrap();
        assert_eq!(ivs.len(), 4);
        let approx: Vec<f64> = ivs
            .iter()
            .map(|iv| refine(&p, iv, &ratio(1, 1000)).unwrap().midpoint_f64())
            .collect();
        let expect = [-2f64.sqrt(), 1.0, 2f64.sqrt(), 2.0];
        for (a, e) in approx.iter().zip(expect) {
            assert!((a - e).abs() < 1e-3, "{a} vs {e}");
        }
        let fine = refine(&p, &ivs[2], &refinement_width()).unwrap();
        assert!((fine.midpoint_f64() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn aberth_finds_roots() {
        let r = complex_roots(&[1.0, 4.0, 4.0, 4.0, 1.0]);
        assert_eq!(r.len(), 4);
        for z in &r {
            let p = z.powu(4) + 4.0 * z.powu(3) + 4.0 * z.powu(2) + 4.0 * z + 1.0;
            assert!(p.norm() < 1e-10);
        }
    }
}
