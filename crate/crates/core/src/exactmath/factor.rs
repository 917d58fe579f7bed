//! Factorization over Q for polynomials of degree at most 8.
//!
//! Squarefree parts come from Yun's algorithm. Each squarefree integer
//! polynomial P is split by trying, for every subset S of its complex roots
//! with |S| ≤ deg/2, the candidate `lc(P)·∏_{r∈S}(x − r)` rounded to integer
//! coefficients. A true factor g | P always appears this way (as lc(P/g)·g),
//! and every candidate is confirmed by exact division, so the result is exact.
//! Degree-1 candidates are exactly the rational-root test.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{FromPrimitive, Zero};

use super::poly::Poly;
use super::rational::Rational;
use super::roots::complex_roots;
use super::ExactError;

pub const MAX_FACTOR_DEGREE: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    /// Leading coefficient of the input.
    pub leading: Rational,
    /// Monic irreducible factors with multiplicity, sorted by degree then coefficients.
    pub factors: Vec<(Poly, usize)>,
}

impl Factorization {
    pub fn expand(&self) -> Poly {
        self.factors
            .iter()
            .fold(Poly::constant(self.leading.clone()), |acc, (f, m)| &acc * &f.pow(*m))
    }

    pub fn is_irreducible(&self) -> bool {
        self.factors.len() == 1 && self.factors[0].1 == 1
    }
}

pub fn factor_over_q(p: &Poly) -> Result<Factorization, ExactError> {
    let deg = p.degree().ok_or(ExactError::ZeroPolynomial)?;
    if deg > MAX_FACTOR_DEGREE {
        return Err(ExactError::UnsupportedDegree(deg, MAX_FACTOR_DEGREE));
    }
    let mut factors = Vec::new();
    for (part, mult) in p.squarefree_decomposition() {
        if part.is_constant() {
            continue;
        }
        for f in split_squarefree(&part) {
            factors.push((f, mult));
        }
    }
    factors.sort_by(|(a, _), (b, _)| {
        a.degree()
            .cmp(&b.degree())
            .then_with(|| a.coeffs().cmp(b.coeffs()))
    });
    Ok(Factorization { leading: p.leading(), factors })
}

/// Monic irreducible factors of a squarefree nonconstant polynomial.
fn split_squarefree(p: &Poly) -> Vec<Poly> {
    let mut out = Vec::new();
    let mut rest = p.monic();
    while let Some(g) = smallest_factor(&rest) {
        rest = rest.exact_div(&g).expect("verified factor");
        out.push(g);
    }
    if !rest.is_constant() {
        out.push(rest.monic());
    }
    out
}

/// Smallest-degree proper monic factor, or `None` when `p` is irreducible.
fn smallest_factor(p: &Poly) -> Option<Poly> {
    let n = p.degree()?;
    if n <= 1 {
        return None;
    }
    let ip = p.primitive_integer();
    let lc = ip[n].clone();
    let coeffs: Vec<f64> = ip.iter().map(|c| bigint_to_f64(c)).collect();
    let roots = complex_roots(&coeffs);
    let lc_f = bigint_to_f64(&lc);
    let target = Poly::from_bigints(&ip);
    for m in 1..=n / 2 {
        let mut found: Option<Poly> = None;
        for_each_subset(n, m, &mut |idx| {
            if found.is_some() {
                return;
            }
            if let Some(g) = candidate(&roots, idx, lc_f) {
                if g.degree() == Some(m) && g.divides(&target) {
                    found = Some(g.monic());
                }
            }
        });
        if found.is_some() {
            return found;
        }
    }
    None
}

/// `lc·∏(x − r_i)` rounded to an integer polynomial, made primitive; `None`
/// when the product is visibly non-real or not close to integral.
fn candidate(roots: &[Complex64], idx: &[usize], lc: f64) -> Option<Poly> {
    let mut c = vec![Complex64::new(lc, 0.0)];
    for &i in idx {
        let r = roots[i];
        let mut next = vec![Complex64::zero(); c.len() + 1];
        for (k, a) in c.iter().enumerate() {
            next[k + 1] += a;
            next[k] -= a * r;
        }
        c = next;
    }
    let mut ints = Vec::with_capacity(c.len());
    for z in &c {
        let scale = 1.0 + z.re.abs();
        if z.im.abs() > 1e-6 * scale {
            return None;
        }
        let r = z.re.round();
        if (z.re - r).abs() > 1e-6 * scale || !r.is_finite() {
            return None;
        }
        ints.push(BigInt::from_f64(r)?);
    }
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return None;
    }
    let ints: Vec<BigInt> = ints.iter().map(|x| x / &g).collect();
    Some(Poly::from_bigints(&ints))
}

fn for_each_subset(n: usize, m: usize, f: &mut dyn FnMut(&[usize])) {
    fn rec(start: usize, n: usize, m: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if cur.len() == m {
            f(cur);
            return;
        }
        for i in start..n {
            if n - i < m - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, m, cur, f);
            cur.pop();
        }
    }
    rec(0, n, m, &mut Vec::new(), f);
}

fn bigint_to_f64(b: &BigInt) -> f64 {
    super::rational::to_f64(&Rational::from_integer(b.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::rational::rat;

    /// Test oracle: exhaustive search for an integer factor of degree
    /// `1..=deg/2` with coefficients bounded by Mignotte's bound
    /// `|g_j| ≤ C(m, j)·‖P‖₂·|lc g|`, capped at `cap`.
    fn exhaustive_factor_search(p: &Poly, cap: i64) -> Option<Poly> {
        let n = p.degree()?;
        let ip = p.primitive_integer();
        let target = Poly::from_bigints(&ip);
        let lc: i64 = ip[n].to_string().parse().unwrap();
        let l2: f64 = ip.iter().map(|c| bigint_to_f64(c).powi(2)).sum::<f64>().sqrt();
        for m in 1..=n / 2 {
            for lead in (1..=lc.abs()).filter(|d| lc % d == 0) {
                let bounds: Vec<i64> = (0..m)
                    .map(|j| ((binom(m, j) as f64 * l2 * lead as f64).ceil() as i64).min(cap))
                    .collect();
                let mut cur: Vec<i64> = bounds.iter().map(|b| -b).collect();
                loop {
                    let mut c: Vec<BigInt> = cur.iter().map(|&x| BigInt::from(x)).collect();
                    c.push(BigInt::from(lead));
                    let g = Poly::from_bigints(&c);
                    if g.divides(&target) {
                        return Some(g.monic());
                    }
                    let mut i = 0;
                    while i < m && cur[i] == bounds[i] {
                        cur[i] = -bounds[i];
                        i += 1;
                    }
                    if i == m {
                        break;
                    }
                    cur[i] += 1;
                }
            }
        }
        None
    }

    fn binom(n: usize, k: usize) -> u64 {
        (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i as u64 + 1))
    }

    #[test]
    fn sl4_charpoly_is_irreducible() {
        let p = Poly::from_i64(&[1, 4, 4, 4, 1]);
        let f = factor_over_q(&p).unwrap();
        assert!(f.is_irreducible());
        assert_eq!(f.expand(), p);
    }

    #[test]
    fn small_factorizations() {
        let f = factor_over_q(&Poly::from_i64(&[-1, 0, 1])).unwrap();
        assert_eq!(
            f.factors,
            vec![(Poly::from_i64(&[-1, 1]), 1), (Poly::from_i64(&[1, 1]), 1)]
        );
        let f = factor_over_q(&Poly::from_i64(&[-4, 0, 0, 0, 1])).unwrap();
        assert_eq!(
            f.factors,
            vec![(Poly::from_i64(&[-2, 0, 1]), 1), (Poly::from_i64(&[2, 0, 1]), 1)]
        );
        assert_eq!(f.expand(), Poly::from_i64(&[-4, 0, 0, 0, 1]));
    }

    #[test]
    fn multiplicities_and_leading_coefficient() {
        // 3 (x-1)^2 (x^2+1)
        let p = &(&Poly::from_i64(&[-1, 1]).pow(2) * &Poly::from_i64(&[1, 0, 1])) * &Poly::constant(rat(3));
        let f = factor_over_q(&p).unwrap();
        assert_eq!(f.leading, rat(3));
        assert_eq!(f.factors.len(), 2);
        assert_eq!(f.factors[0], (Poly::from_i64(&[-1, 1]), 2));
        assert_eq!(f.expand(), p);
    }

    #[test]
    fn degree_bound() {
        let p = Poly::monomial(rat(1), 9);
        assert!(matches!(factor_over_q(&p), Err(ExactError::UnsupportedDegree(9, 8))));
    }

    #[test]
    fn non_monic_rational_factor() {
        // (2x - 1)(3x^2 - 5)
        let p = &Poly::from_i64(&[-1, 2]) * &Poly::from_i64(&[-5, 0, 3]);
        let f = factor_over_q(&p).unwrap();
        assert_eq!(f.factors.len(), 2);
        assert_eq!(f.expand(), p);
        assert!(exhaustive_factor_search(&f.factors[1].0, 50).is_none());
    }

    #[test]
    fn exhaustive_oracle_finds_known_factor() {
        let p = Poly::from_i64(&[-4, 0, 0, 0, 1]);
        let g = exhaustive_factor_search(&p, 20).unwrap();
        assert!(g.divides(&p));
        assert!(exhaustive_factor_search(&Poly::from_i64(&[1, 4, 4, 4, 1]), 20).is_none());
    }
}
