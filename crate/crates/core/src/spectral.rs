//! Spectral classification of `A` and the splitting `R^d = E^s ⊕ E^u ⊕ E^c` of `Aᵀ`.
//!
//! Everything that decides a yes/no question (irreducibility, unit-modulus
//! eigenvalues, positive real eigenvalues) is exact. Subspace bases are binary64.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::exactmath::factor::factor_over_q;
use crate::exactmath::roots::{complex_roots, isolate_real_roots_in, refine, refinement_width};
use crate::exactmath::{rat, sturm_count, ExactError, IsolatingInterval, Poly, Rational, RationalMatrix};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpectralError {
    #[error("matrix is singular")]
    Singular,
    #[error("matrix must be square")]
    NotSquare,
    #[error("unit-circle eigenvalue {0} is not semisimple; no bounded invariant central plane exists")]
    DefectiveUnitBlock(String),
    #[error("numerical splitting failed: {0}")]
    Numerical(String),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// Unit-modulus roots of a squarefree polynomial, counted exactly.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UnitRootCount {
    pub plus_one: bool,
    pub minus_one: bool,
    /// Number of conjugate pairs `e^{±iθ}` with `0 < θ < π`.
    pub pairs: usize,
    /// `q(y)` with `h(x) = x^m q(x + 1/x)`, where `h` is the reciprocal part
    /// of the polynomial with the factors `x ∓ 1` removed.
    pub transformed: Option<Poly>,
}

impl UnitRootCount {
    pub fn total(&self) -> usize {
        2 * self.pairs + self.plus_one as usize + self.minus_one as usize
    }
}

/// Writes a palindromic polynomial `h` of degree `2m` as `x^m q(x + 1/x)`.
pub fn reciprocal_transform(h: &Poly) -> Poly {
    let n = h.degree().unwrap_or(0);
    let m = n / 2;
    // P_0 = 2, P_1 = y, P_j = y P_{j-1} - P_{j-2}; P_j(x + 1/x) = x^j + x^{-j}.
    let mut p_prev = Poly::constant(rat(2));
    let mut p_cur = Poly::x();
    let mut q = Poly::constant(h.coeff(m));
    for j in 1..=m {
        if j > 1 {
            let next = &(&Poly::x() * &p_cur) - &p_prev;
            p_prev = std::mem::replace(&mut p_cur, next);
        }
        q = &q + &p_cur.scale(&h.coeff(m + j));
    }
    q
}

/// Exact count of unit-modulus roots of a nonconstant polynomial.
pub fn unit_roots(p: &Poly) -> Result<UnitRootCount, ExactError> {
    let p = p.squarefree_part();
    let plus_one = p.eval(&rat(1)).is_zero();
    let minus_one = p.eval(&rat(-1)).is_zero();
    let mut g = p.gcd(&p.reverse());
    for r in [1, -1] {
        let lin = Poly::from_i64(&[-r, 1]);
        if lin.divides(&g) {
            g = g.exact_div(&lin)?;
        }
    }
    if g.is_constant() {
        return Ok(UnitRootCount { plus_one, minus_one, pairs: 0, transformed: None });
    }
    let q = reciprocal_transform(&g.monic());
    let pairs = sturm_count(&q.squarefree_part(), &rat(-2), &rat(2))?;
    Ok(UnitRootCount { plus_one, minus_one, pairs, transformed: Some(q) })
}

/// A real algebraic number given by its minimal polynomial and an isolating interval.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RealAlgebraic {
    pub minpoly: Poly,
    pub interval: IsolatingInterval,
    pub approx: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralClassification {
    pub charpoly: Poly,
    pub factors: Vec<(Poly, usize)>,
    pub irreducible_over_q: bool,
    pub hyperbolic: bool,
    pub has_positive_real_eigenvalue: bool,
    pub unit_roots: UnitRootCount,
    /// Product of the irreducible factors of the characteristic polynomial
    /// that have a root of modulus 1.
    pub unit_circle_factor: Option<Poly>,
    /// Largest positive real eigenvalue.
    pub chosen_lambda: Option<RealAlgebraic>,
}

pub fn classify(a: &RationalMatrix) -> Result<SpectralClassification, SpectralError> {
    if !a.is_square() {
        return Err(SpectralError::NotSquare);
    }
    if a.det()?.is_zero() {
        return Err(SpectralError::Singular);
    }
    let cp = a.charpoly()?;
    let fact = factor_over_q(&cp)?;
    let unit = unit_roots(&cp)?;
    let hyperbolic = unit.total() == 0;

    let mut unit_factor = Poly::one();
    for (f, _) in &fact.factors {
        if unit_roots(f)?.total() > 0 {
            unit_factor = &unit_factor * f;
        }
    }
    let unit_circle_factor = (!unit_factor.is_constant()).then_some(unit_factor);

    // 0 is not an eigenvalue, so (0, B) with B above the Cauchy bound holds every positive root.
    let sf = cp.squarefree_part();
    let bound = &sf.cauchy_bound() + Rational::one();
    let positive = isolate_real_roots_in(&sf, &Rational::zero(), &bound)?;
    let chosen_lambda = match positive.last() {
        None => None,
        Some(iv) => {
            let minpoly = fact
                .factors
                .iter()
                .map(|(f, _)| f)
                .find(|f| sturm_count(f, &iv.lo, &iv.hi).unwrap_or(0) == 1)
                .cloned()
                .expect("every root belongs to some irreducible factor");
            let interval = refine(&minpoly, iv, &refinement_width())?;
            let approx = interval.midpoint_f64();
            Some(RealAlgebraic { minpoly, interval, approx })
        }
    };

    Ok(SpectralClassification {
        charpoly: cp,
        irreducible_over_q: fact.is_irreducible(),
        factors: fact.factors,
        hyperbolic,
        has_positive_real_eigenvalue: chosen_lambda.is_some(),
        unit_roots: unit,
        unit_circle_factor,
        chosen_lambda,
    })
}

/// Real invariant subspaces of `Aᵀ` with orthonormal bases (columns).
#[derive(Clone, Debug, Serialize)]
pub struct SpectralSplit {
    pub dim: usize,
    #[serde(serialize_with = "ser_cols")]
    pub stable: DMatrix<f64>,
    #[serde(serialize_with = "ser_cols")]
    pub unstable: DMatrix<f64>,
    #[serde(serialize_with = "ser_cols")]
    pub central: DMatrix<f64>,
    /// Bounded invariant subspace of dimension 1 or 2 inside `E^c` (empty if `E^c = 0`).
    #[serde(serialize_with = "ser_cols")]
    pub central_star: DMatrix<f64>,
    /// Unit eigenvalue whose real eigenspace spans `E^c_*`.
    pub central_star_eigenvalue: Option<[f64; 2]>,
    /// Largest modulus among stable eigenvalues (`λ' < 1`).
    pub contraction_rate: Option<f64>,
    /// Smallest modulus among unstable eigenvalues (`λ > 1`).
    pub expansion_rate: Option<f64>,
    #[serde(skip)]
    coords: DMatrix<f64>,
    /// `Aᵀ` restricted to E^s, E^u, E^c in their orthonormal bases, and inverses.
    #[serde(skip)]
    restricted: [(DMatrix<f64>, DMatrix<f64>); 3],
}

fn ser_cols<S: serde::Serializer>(m: &DMatrix<f64>, s: S) -> Result<S::Ok, S::Error> {
    let cols: Vec<Vec<f64>> = m.column_iter().map(|c| c.iter().copied().collect()).collect();
    serde::Serialize::serialize(&cols, s)
}

impl SpectralSplit {
    /// Components `(π_s v, π_u v, π_c v)` for the direct sum.
    pub fn project(&self, v: &DVector<f64>) -> (DVector<f64>, DVector<f64>, DVector<f64>) {
        let c = &self.coords * v;
        let (ns, nu) = (self.stable.ncols(), self.unstable.ncols());
        let cs = c.rows(0, ns).into_owned();
        let cu = c.rows(ns, nu).into_owned();
        let cc = c.rows(ns + nu, self.central.ncols()).into_owned();
        (&self.stable * cs, &self.unstable * cu, &self.central * cc)
    }

    /// `(Aᵀ)^k v`, evolving each spectral component inside its own subspace so
    /// that rounding never leaks into a faster-growing direction.
    pub fn evolve(&self, v: &DVector<f64>, k: i64) -> DVector<f64> {
        self.evolve_parts(v, k, [true; 3])
    }

    /// Like [`evolve`](Self::evolve) but keeps only the selected components
    /// `[stable, unstable, central]`. For a vector known to lie in `E^c`,
    /// `[false, false, true]` discards rounding-level hyperbolic components.
    pub fn evolve_parts(&self, v: &DVector<f64>, k: i64, keep: [bool; 3]) -> DVector<f64> {
        let c = &self.coords * v;
        let mut out = DVector::zeros(self.dim);
        let mut off = 0;
        for (i, (basis, (r, r_inv))) in [&self.stable, &self.unstable, &self.central].into_iter().zip(&self.restricted).enumerate() {
            let n = basis.ncols();
            if !keep[i] {
                off += n;
                continue;
            }
            let mut w = c.rows(off, n).into_owned();
            let m = if k >= 0 { r } else { r_inv };
            for _ in 0..k.unsigned_abs() {
                w = m * w;
            }
            out += basis * w;
            off += n;
        }
        out
    }

    /// `‖v‖_* = max(‖π_s v‖, ‖π_u v‖)`.
    pub fn norm_star(&self, v: &DVector<f64>) -> f64 {
        let (s, u, _) = self.project(v);
        s.norm().max(u.norm())
    }

    /// Largest `‖Aᵀu − P(Aᵀu)‖ / ‖u‖` over basis vectors `u` of each subspace,
    /// where `P` projects orthogonally onto that subspace.
    pub fn invariance_residual(&self, at: &DMatrix<f64>) -> f64 {
        [&self.stable, &self.unstable, &self.central, &self.central_star]
            .iter()
            .filter(|b| b.ncols() > 0)
            .flat_map(|b| {
                let p = *b * b.transpose();
                b.column_iter()
                    .map(|u| {
                        let w = at * u;
                        (&w - &p * &w).norm() / u.norm()
                    })
                    .collect::<Vec<_>>()
            })
            .fold(0.0, f64::max)
    }

    /// `‖B B⁻¹ − I‖` for `B = [E^s E^u E^c]`; measures the direct-sum reconstruction.
    pub fn reconstruction_residual(&self) -> f64 {
        let b = self.basis();
        (&b * &self.coords - DMatrix::identity(self.dim, self.dim)).norm()
    }

    fn basis(&self) -> DMatrix<f64> {
        let mut b = DMatrix::zeros(self.dim, self.dim);
        let mut j = 0;
        for m in [&self.stable, &self.unstable, &self.central] {
            for c in m.column_iter() {
                b.set_column(j, &c);
                j += 1;
            }
        }
        b
    }
}

/// Evaluates a real polynomial (ascending coefficients) at a square matrix.
fn poly_at(coeffs: &[f64], m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    let mut acc = DMatrix::zeros(n, n);
    for c in coeffs.iter().rev() {
        acc = &acc * m + DMatrix::identity(n, n) * *c;
    }
    acc
}

/// Real coefficients of `∏ (x − μ)` over a conjugation-closed root list.
fn real_poly(roots: &[Complex64]) -> Vec<f64> {
    let mut c = vec![Complex64::one()];
    for r in roots {
        let mut next = vec![Complex64::zero(); c.len() + 1];
        for (k, a) in c.iter().enumerate() {
            next[k + 1] += a;
            next[k] -= a * r;
        }
        c = next;
    }
    c.iter().map(|z| z.re).collect()
}

/// Orthonormal basis of the numerical kernel of `m`, of the given dimension.
fn kernel(m: &DMatrix<f64>, dim: usize) -> Result<DMatrix<f64>, SpectralError> {
    let n = m.ncols();
    if dim == 0 {
        return Ok(DMatrix::zeros(n, 0));
    }
    let scale = m.norm().max(1.0);
    let svd = m.clone().svd(false, true);
    let vt = svd.v_t.ok_or_else(|| SpectralError::Numerical("svd failed".into()))?;
    let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
    idx.sort_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]));
    // A full-rank m pads the SVD with fewer rows; with square m this is n rows.
    if idx.len() < dim {
        return Err(SpectralError::Numerical("kernel larger than svd rank".into()));
    }
    let worst = svd.singular_values[idx[dim - 1]] / scale;
    if worst > 1e-6 {
        return Err(SpectralError::Numerical(format!("expected kernel of dimension {dim}, smallest singular values too large ({worst:e})")));
    }
    let mut k = DMatrix::zeros(n, dim);
    for (j, &i) in idx.iter().take(dim).enumerate() {
        k.set_column(j, &vt.row(i).transpose());
    }
    Ok(k)
}

fn orthonormalize(vs: &[DVector<f64>]) -> DMatrix<f64> {
    let n = vs.first().map_or(0, |v| v.len());
    let mut out: Vec<DVector<f64>> = Vec::new();
    for v in vs {
        let mut w = v.clone();
        for u in &out {
            w -= u * u.dot(&w);
        }
        if w.norm() > 1e-12 * v.norm().max(1e-300) {
            out.push(w.normalize());
        }
    }
    let mut m = DMatrix::zeros(n, out.len());
    for (j, u) in out.iter().enumerate() {
        m.set_column(j, u);
    }
    m
}

/// Numerical splitting of `Aᵀ`. The exact unit-root count decides how many
/// (multiplicity-counted) eigenvalues are assigned to `E^c`.
pub fn splitting(a: &RationalMatrix) -> Result<SpectralSplit, SpectralError> {
    let class = classify(a)?;
    let d = a.rows();
    let at_exact = a.transpose();
    let at = at_exact.to_f64();

    // Exact multiplicity-counted number of unit roots, and semisimplicity on them.
    let mut n_unit = 0;
    let mut unit_sf = Poly::one();
    for (s, mult) in class.charpoly.squarefree_decomposition() {
        let u = unit_roots(&s)?;
        n_unit += u.total() * mult;
    }
    for (f, _) in &class.factors {
        if unit_roots(f)?.total() > 0 {
            unit_sf = &unit_sf * f;
        }
    }
    if n_unit > 0 {
        let kdim = d - at_exact.eval_poly(&unit_sf)?.rank();
        if kdim < n_unit {
            return Err(SpectralError::DefectiveUnitBlock(unit_sf.to_string()));
        }
    }

    let mut roots = complex_roots(&class.charpoly.coeffs_f64());
    roots.sort_by(|x, y| (x.norm() - 1.0).abs().total_cmp(&(y.norm() - 1.0).abs()));
    let (unit, rest) = roots.split_at(n_unit);
    let stable: Vec<Complex64> = rest.iter().copied().filter(|z| z.norm() < 1.0).collect();
    let unstable: Vec<Complex64> = rest.iter().copied().filter(|z| z.norm() > 1.0).collect();

    let es = kernel(&poly_at(&real_poly(&stable), &at), stable.len())?;
    let eu = kernel(&poly_at(&real_poly(&unstable), &at), unstable.len())?;
    let ec = kernel(&poly_at(&real_poly(unit), &at), unit.len())?;

    // E^c_*: eigenvalue with the smallest |argument|.
    let star = unit
        .iter()
        .copied()
        .min_by(|x, y| x.arg().abs().total_cmp(&y.arg().abs()).then(y.im.total_cmp(&x.im)));
    let (central_star, central_star_eigenvalue) = match star {
        None => (DMatrix::zeros(d, 0), None),
        Some(mu) => {
            let (m, is_real) = if mu.im.abs() < 1e-9 {
                let r = mu.re.signum();
                (poly_at(&[-r, 1.0], &at), true)
            } else {
                (poly_at(&[1.0, -2.0 * mu.re, 1.0], &at), false)
            };
            let mult = unit.iter().filter(|z| (*z - mu).norm() < 1e-6 || (*z - mu.conj()).norm() < 1e-6).count();
            let k = kernel(&m, mult)?;
            let v: DVector<f64> = k.column(0).into_owned();
            let basis = if is_real { orthonormalize(&[v]) } else { orthonormalize(&[v.clone(), &at * &v]) };
            (basis, Some([mu.re, mu.im.abs()]))
        }
    };

    let contraction_rate = stable.iter().map(|z| z.norm()).reduce(f64::max);
    let expansion_rate = unstable.iter().map(|z| z.norm()).reduce(f64::min);

    let mut b = DMatrix::zeros(d, d);
    let mut j = 0;
    for m in [&es, &eu, &ec] {
        for c in m.column_iter() {
            b.set_column(j, &c);
            j += 1;
        }
    }
    let coords = b
        .try_inverse()
        .ok_or_else(|| SpectralError::Numerical("subspaces are not complementary".into()))?;
    let restrict = |q: &DMatrix<f64>| -> Result<(DMatrix<f64>, DMatrix<f64>), SpectralError> {
        let r = q.transpose() * &at * q;
        let r_inv = r
            .clone()
            .try_inverse()
            .ok_or_else(|| SpectralError::Numerical("restricted operator is singular".into()))?;
        Ok((r, r_inv))
    };
    let restricted = [restrict(&es)?, restrict(&eu)?, restrict(&ec)?];

    Ok(SpectralSplit {
        dim: d,
        stable: es,
        unstable: eu,
        central: ec,
        central_star,
        central_star_eigenvalue,
        contraction_rate,
        expansion_rate,
        coords,
        restricted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::numfield::{field_mat_vec, field_solve, NfElem, NumberField};

    pub(crate) fn sl4() -> RationalMatrix {
        RationalMatrix::from_i64(&[&[0, 0, 0, -1], &[1, 0, 0, -4], &[0, 1, 0, -4], &[0, 0, 1, -4]])
    }

    #[test]
    fn sl4_classification() {
        let c = classify(&sl4()).unwrap();
        assert_eq!(c.charpoly, Poly::from_i64(&[1, 4, 4, 4, 1]));
        assert!(c.irreducible_over_q);
        assert!(!c.hyperbolic);
        assert_eq!(c.unit_roots.transformed, Some(Poly::from_i64(&[2, 4, 1])));
        assert_eq!(c.unit_roots.pairs, 1);
        assert_eq!(c.unit_circle_factor, Some(Poly::from_i64(&[1, 4, 4, 4, 1])));
        assert!(!c.has_positive_real_eigenvalue);
    }

    #[test]
    fn transform_oracle_by_expansion() {
        // x^2 q(x + 1/x) must reproduce h exactly.
        let h = Poly::from_i64(&[1, 4, 4, 4, 1]);
        let q = reciprocal_transform(&h);
        let mut acc = Poly::zero();
        // x^m (x + 1/x)^j = x^{m-j} (x^2 + 1)^j
        for (j, c) in q.coeffs().iter().enumerate() {
            let term = &Poly::monomial(c.clone(), 2 - j) * &Poly::from_i64(&[1, 0, 1]).pow(j);
            acc = &acc + &term;
        }
        assert_eq!(acc, h);
    }

    #[test]
    fn small_cases() {
        let c = classify(&RationalMatrix::from_i64(&[&[2]])).unwrap();
        assert!(c.hyperbolic && c.has_positive_real_eigenvalue);
        assert_eq!(c.chosen_lambda.unwrap().minpoly, Poly::from_i64(&[-2, 1]));
        let c = classify(&RationalMatrix::from_i64(&[&[0, -1], &[1, 0]])).unwrap();
        assert!(!c.hyperbolic && !c.has_positive_real_eigenvalue);
        assert_eq!(c.unit_roots.pairs, 1);
        let c = classify(&RationalMatrix::from_i64(&[&[1, 0], &[0, 1]])).unwrap();
        assert!(!c.hyperbolic && c.unit_roots.plus_one);
        assert_eq!(c.chosen_lambda.unwrap().approx, 1.0);
        assert_eq!(classify(&RationalMatrix::from_i64(&[&[1, 2], &[2, 4]])).unwrap_err(), SpectralError::Singular);
    }

    #[test]
    fn largest_positive_eigenvalue_is_chosen() {
        // eigenvalues 3, 1/2, -5
        let a = RationalMatrix::diagonal(&[rat(3), crate::exactmath::ratio(1, 2), rat(-5)]);
        let c = classify(&a).unwrap();
        assert_eq!(c.chosen_lambda.unwrap().minpoly, Poly::from_i64(&[-3, 1]));
        let fib = RationalMatrix::from_i64(&[&[0, 1], &[1, 1]]);
        let l = classify(&fib).unwrap().chosen_lambda.unwrap();
        assert!((l.approx - (1.0 + 5f64.sqrt()) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn sl4_splitting() {
        let s = splitting(&sl4()).unwrap();
        assert_eq!((s.stable.ncols(), s.unstable.ncols(), s.central.ncols(), s.central_star.ncols()), (1, 1, 2, 2));
        let at = sl4().transpose().to_f64();
        assert!(s.invariance_residual(&at) < 1e-9);
        assert!(s.reconstruction_residual() < 1e-9);
        // Bounded central orbit. Oracle: exact powers of Aᵀ in Q(√2) applied to a
        // kernel vector of p2(Aᵀ), p2 = x^2 + (2 - √2)x + 1.
        let k2 = NumberField::new(&Poly::from_i64(&[-2, 0, 1]), IsolatingInterval { lo: rat(1), hi: rat(2) }).unwrap();
        let r2 = NfElem::generator(&k2);
        let c = |x: &Rational| NfElem::from_rational(&k2, x);
        let at_q = sl4().transpose();
        let at_k: Vec<Vec<NfElem>> = (0..4).map(|i| (0..4).map(|j| c(at_q.get(i, j))).collect()).collect();
        let at2 = sl4().transpose().pow(2).unwrap();
        let b = c(&rat(2)).sub(&r2).unwrap();
        let p2: Vec<Vec<NfElem>> = (0..4)
            .map(|i| {
                (0..4)
                    .map(|j| {
                        let id = if i == j { rat(1) } else { rat(0) };
                        c(&(at2.get(i, j) + id)).add(&b.mul(&at_k[i][j]).unwrap()).unwrap()
                    })
                    .collect()
            })
            .collect();
        let ker = field_solve(&p2).unwrap();
        assert_eq!(ker.len(), 2);
        let mut w = ker[0].clone();
        let emb = |w: &[NfElem]| DVector::from_iterator(4, w.iter().map(|e| e.to_f64()));
        let v0 = emb(&w);
        let (_, _, v0c) = s.project(&v0);
        assert!((&v0c - &v0).norm() < 1e-12 * v0.norm());
        let mut exact_sup: f64 = 1.0;
        for k in 1..=60 {
            w = field_mat_vec(&at_k, &w).unwrap();
            let ratio = emb(&w).norm() / v0.norm();
            exact_sup = exact_sup.max(ratio);
            let approx = s.evolve_parts(&v0c, k, [false, false, true]);
            // phase drift of about 1e-11 per step
            assert!((&approx - emb(&w)).norm() <= 1e-7 * emb(&w).norm(), "k={k}");
        }
        assert!(exact_sup <= 10.0, "{exact_sup}");
        let v: DVector<f64> = s.central_star.column(0).into_owned();
        let mut sup: f64 = 0.0;
        for k in -60..=60 {
            sup = sup.max(s.evolve_parts(&v, k, [false, false, true]).norm() / v.norm());
        }
        assert!(sup <= 10.0, "{sup}");
    }

    #[test]
    fn diagonal_splitting() {
        let a = RationalMatrix::diagonal(&[rat(2), crate::exactmath::ratio(1, 2)]);
        let s = splitting(&a).unwrap();
        assert!((s.unstable[(0, 0)].abs() - 1.0).abs() < 1e-12);
        assert!((s.stable[(1, 0)].abs() - 1.0).abs() < 1e-12);
        assert_eq!(s.central.ncols(), 0);
        let s = splitting(&RationalMatrix::from_i64(&[&[2]])).unwrap();
        assert_eq!((s.stable.ncols(), s.unstable.ncols(), s.central.ncols()), (0, 1, 0));
        let v = DVector::from_vec(vec![3.0, 4.0]);
        let s = splitting(&a).unwrap();
        assert!((s.norm_star(&v) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn defective_unit_block_rejected() {
        let j = RationalMatrix::from_i64(&[&[1, 1], &[0, 1]]);
        assert!(matches!(splitting(&j), Err(SpectralError::DefectiveUnitBlock(_))));
        let r = RationalMatrix::from_i64(&[&[-1, 0], &[0, -1]]);
        let s = splitting(&r).unwrap();
        assert_eq!(s.central.ncols(), 2);
        assert_eq!(s.central_star.ncols(), 1);
    }
}
