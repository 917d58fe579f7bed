//! Simple real number fields Q(λ) = Q[x]/(m) with a chosen real embedding.

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::factor::factor_over_q;
use super::poly::Poly;
use super::rational::{format_rational, to_f64, Rational};
use super::roots::{refine, refinement_width, sturm_count, IsolatingInterval};
use super::ExactError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NumberField {
    /// Monic irreducible minimal polynomial of λ.
    pub minpoly: Poly,
    /// Isolates λ among the real roots of `minpoly`; width < 2^-64.
    pub interval: IsolatingInterval,
}

impl NumberField {
    /// Validates irreducibility and isolation, then refines the interval.
    pub fn new(minpoly: &Poly, interval: IsolatingInterval) -> Result<Arc<Self>, ExactError> {
        let m = minpoly.monic();
        let deg = m.degree().ok_or(ExactError::ZeroPolynomial)?;
        if deg == 0 {
            return Err(ExactError::InvalidField("constant minimal polynomial".into()));
        }
        if !factor_over_q(&m)?.is_irreducible() {
            return Err(ExactError::InvalidField(format!("{m} is reducible")));
        }
        if sturm_count(&m, &interval.lo, &interval.hi)? != 1 {
            return Err(ExactError::InvalidField("interval does not isolate one root".into()));
        }
        let interval = refine(&m, &interval, &refinement_width())?;
        Ok(Arc::new(NumberField { minpoly: m, interval }))
    }

    /// The field Q, presented as Q[x]/(x − r).
    pub fn rational(r: &Rational) -> Arc<Self> {
        let iv = super::roots::rational_root_interval(r);
        Arc::new(NumberField { minpoly: Poly::linear_root(r.clone()), interval: iv })
    }

    pub fn degree(&self) -> usize {
        self.minpoly.degree().unwrap_or(0)
    }

    pub fn approx(&self) -> f64 {
        self.interval.midpoint_f64()
    }
}

/// Element of a number field, stored by power-basis coordinates.
#[derive(Clone)]
pub struct NfElem {
    field: Arc<NumberField>,
    coords: Vec<Rational>,
}

fn same_field(a: &Arc<NumberField>, b: &Arc<NumberField>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl NfElem {
    pub fn from_poly(field: &Arc<NumberField>, p: &Poly) -> Self {
        let r = p.rem(&field.minpoly).expect("minpoly nonzero");
        let n = field.degree();
        let coords = (0..n).map(|k| r.coeff(k)).collect();
        NfElem { field: field.clone(), coords }
    }

    pub fn from_coords(field: &Arc<NumberField>, coords: &[Rational]) -> Self {
        Self::from_poly(field, &Poly::new(coords.to_vec()))
    }

    pub fn from_rational(field: &Arc<NumberField>, r: &Rational) -> Self {
        Self::from_poly(field, &Poly::constant(r.clone()))
    }

    pub fn zero(field: &Arc<NumberField>) -> Self {
        Self::from_rational(field, &Rational::zero())
    }

    pub fn one(field: &Arc<NumberField>) -> Self {
        Self::from_rational(field, &Rational::one())
    }

    /// The generator λ.
    pub fn generator(field: &Arc<NumberField>) -> Self {
        Self::from_poly(field, &Poly::x())
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    pub fn as_poly(&self) -> Poly {
        Poly::new(self.coords.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.coords.first().is_some_and(|c| c.is_one())
            && self.coords.iter().skip(1).all(|c| c.is_zero())
    }

    /// `Some(r)` when the element lies in Q.
    pub fn as_rational(&self) -> Option<Rational> {
        if self.coords.iter().skip(1).all(|c| c.is_zero()) {
            Some(self.coords.first().cloned().unwrap_or_else(Rational::zero))
        } else {
            None
        }
    }

    fn check(&self, other: &NfElem) -> Result<(), ExactError> {
        if same_field(&self.field, &other.field) {
            Ok(())
        } else {
            Err(ExactError::FieldMismatch)
        }
    }

    pub fn add(&self, o: &NfElem) -> Result<NfElem, ExactError> {
        self.check(o)?;
        Ok(Self::from_poly(&self.field, &(&self.as_poly() + &o.as_poly())))
    }

    pub fn sub(&self, o: &NfElem) -> Result<NfElem, ExactError> {
        self.check(o)?;
        Ok(Self::from_poly(&self.field, &(&self.as_poly() - &o.as_poly())))
    }

    pub fn mul(&self, o: &NfElem) -> Result<NfElem, ExactError> {
        self.check(o)?;
        Ok(Self::from_poly(&self.field, &(&self.as_poly() * &o.as_poly())))
    }

    pub fn scale(&self, r: &Rational) -> NfElem {
        Self::from_poly(&self.field, &self.as_poly().scale(r))
    }

    pub fn neg(&self) -> NfElem {
        Self::from_poly(&self.field, &-&self.as_poly())
    }

    pub fn inv(&self) -> Result<NfElem, ExactError> {
        if self.is_zero() {
            return Err(ExactError::Singular);
        }
        let (g, s, _) = self.as_poly().ext_gcd(&self.field.minpoly);
        debug_assert!(g.is_constant());
        Ok(Self::from_poly(&self.field, &s))
    }

    pub fn div(&self, o: &NfElem) -> Result<NfElem, ExactError> {
        self.mul(&o.inv()?)
    }

    pub fn pow(&self, k: i64) -> Result<NfElem, ExactError> {
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let mut acc = NfElem::one(&self.field);
        let mut b = base;
        let mut e = k.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&b)?;
            }
            b = b.mul(&b)?;
            e >>= 1;
        }
        Ok(acc)
    }

    /// Exact sign in the real embedding: -1, 0 or 1.
    pub fn signum(&self) -> i32 {
        if self.is_zero() {
            return 0;
        }
        if let Some(r) = self.as_rational() {
            return if r.is_positive() { 1 } else { -1 };
        }
        let m = &self.field.minpoly;
        let e = self.as_poly();
        let esf = e.squarefree_part();
        let (mut lo, mut hi) = (self.field.interval.lo.clone(), self.field.interval.hi.clone());
        let m_lo = m.eval(&lo).signum();
        let two = Rational::from_integer(2.into());
        loop {
            let (el, eh) = (e.eval(&lo), e.eval(&hi));
            if !el.is_zero() && !eh.is_zero() && sturm_count(&esf, &lo, &hi) == Ok(0) {
                return if el.is_positive() { 1 } else { -1 };
            }
            let mid = (&lo + &hi) / &two;
            if m.eval(&mid).signum() == m_lo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    /// Value in the real embedding, correct to about binary64 precision.
    pub fn to_f64(&self) -> f64 {
        if let Some(r) = self.as_rational() {
            return to_f64(&r);
        }
        let m = &self.field.minpoly;
        let e = self.as_poly();
        let (mut lo, mut hi) = (self.field.interval.lo.clone(), self.field.interval.hi.clone());
        let m_lo = m.eval(&lo).signum();
        let two = Rational::from_integer(2.into());
        for _ in 0..256 {
            let (a, b) = (to_f64(&e.eval(&lo)), to_f64(&e.eval(&hi)));
            if (a - b).abs() <= 1e-17 * a.abs().max(b.abs()) {
                break;
            }
            let mid = (&lo + &hi) / &two;
            if m.eval(&mid).signum() == m_lo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        to_f64(&e.eval(&((&lo + &hi) / &two)))
    }

    pub fn coords_strings(&self) -> Vec<String> {
        self.coords.iter().map(format_rational).collect()
    }
}

impl PartialEq for NfElem {
    fn eq(&self, other: &Self) -> bool {
        same_field(&self.field, &other.field) && self.coords == other.coords
    }
}

impl Eq for NfElem {}

impl fmt::Debug for NfElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NfElem({} mod {})", self.as_poly(), self.field.minpoly)
    }
}

impl fmt::Display for NfElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_poly().to_string().replace('x', "λ"))
    }
}

impl Serialize for NfElem {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.coords_strings().serialize(s)
    }
}

/// Kernel basis of a square matrix over one number field, by Gauss–Jordan
/// elimination. Each basis vector has a 1 in its free coordinate.
pub fn field_solve(m: &[Vec<NfElem>]) -> Result<Vec<Vec<NfElem>>, ExactError> {
    let rows = m.len();
    if rows == 0 {
        return Ok(Vec::new());
    }
    let cols = m[0].len();
    if m.iter().any(|r| r.len() != cols) || cols != rows {
        return Err(ExactError::Dimension("field_solve expects a square matrix".into()));
    }
    let field = m[0][0].field().clone();
    for e in m.iter().flatten() {
        if !same_field(e.field(), &field) {
            return Err(ExactError::FieldMismatch);
        }
    }
    let mut a: Vec<Vec<NfElem>> = m.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        let inv = a[r][c].inv()?;
        for j in 0..cols {
            a[r][j] = a[r][j].mul(&inv)?;
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..cols {
                    let t = f.mul(&a[r][j])?;
                    a[i][j] = a[i][j].sub(&t)?;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    let mut basis = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![NfElem::zero(&field); cols];
        v[free] = NfElem::one(&field);
        for (pi, &pc) in pivots.iter().enumerate() {
            v[pc] = a[pi][free].neg();
        }
        basis.push(v);
    }
    Ok(basis)
}

/// `M·v` over the field.
pub fn field_mat_vec(m: &[Vec<NfElem>], v: &[NfElem]) -> Result<Vec<NfElem>, ExactError> {
    m.iter()
        .map(|row| {
            row.iter().zip(v).try_fold(NfElem::zero(v[0].field()), |acc, (a, b)| acc.add(&a.mul(b)?))
        })
        .collect()
}
