//! Dense matrices over Q.

use std::fmt;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::poly::Poly;
use super::rational::{format_rational, parse_rational, rat, to_f64, Rational};
use super::ExactError;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl RationalMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Rational>) -> Result<Self, ExactError> {
        if entries.len() != rows * cols {
            return Err(ExactError::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(RationalMatrix { rows, cols, entries })
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self, ExactError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(ExactError::Dimension("ragged rows".into()));
        }
        RationalMatrix::new(r, c, rows.into_iter().flatten().collect())
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        RationalMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| rat(x)).collect())
                .collect(),
        )
        .expect("rectangular literal")
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix { rows, cols, entries: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = RationalMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn diagonal(d: &[Rational]) -> Self {
        let mut m = RationalMatrix::zeros(d.len(), d.len());
        for (i, x) in d.iter().enumerate() {
            m.set(i, i, x.clone());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = RationalMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, rhs: &RationalMatrix) -> Result<Self, ExactError> {
        if self.cols != rhs.rows {
            return Err(ExactError::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = RationalMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.entries[i * rhs.cols + j] += a * rhs.get(k, j);
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Result<Vec<Rational>, ExactError> {
        if v.len() != self.cols {
            return Err(ExactError::Dimension(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect())
    }

    pub fn add(&self, rhs: &RationalMatrix) -> Result<Self, ExactError> {
        self.same_shape(rhs)?;
        Ok(RationalMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, rhs: &RationalMatrix) -> Result<Self, ExactError> {
        self.same_shape(rhs)?;
        Ok(RationalMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn scale(&self, c: &Rational) -> Self {
        RationalMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|a| a * c).collect(),
        }
    }

    fn same_shape(&self, rhs: &RationalMatrix) -> Result<(), ExactError> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(ExactError::Dimension("shape mismatch".into()));
        }
        Ok(())
    }

    fn require_square(&self) -> Result<(), ExactError> {
        if self.is_square() {
            Ok(())
        } else {
            Err(ExactError::Dimension(format!(
                "expected a square matrix, got {}x{}",
                self.rows, self.cols
            )))
        }
    }

    /// Row echelon form by exact Gaussian elimination; returns the pivot columns
    /// and the sign/scale product needed for the determinant.
    fn echelon(&self) -> (RationalMatrix, Vec<usize>, Rational) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut det_factor = Rational::one();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..m.cols {
                    m.entries.swap(p * m.cols + j, r * m.cols + j);
                }
                det_factor = -det_factor;
            }
            let piv = m.get(r, c).clone();
            for i in r + 1..m.rows {
                let f = m.get(i, c) / &piv;
                if f.is_zero() {
                    continue;
                }
                for j in c..m.cols {
                    let v = m.get(r, j) * &f;
                    m.entries[i * m.cols + j] -= v;
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots, det_factor)
    }

    pub fn rank(&self) -> usize {
        self.echelon().1.len()
    }

    pub fn det(&self) -> Result<Rational, ExactError> {
        self.require_square()?;
        let (m, pivots, sign) = self.echelon();
        if pivots.len() < self.rows {
            return Ok(Rational::zero());
        }
        Ok((0..self.rows).fold(sign, |acc, i| acc * m.get(i, i)))
    }

    pub fn inverse(&self) -> Result<Self, ExactError> {
        self.require_square()?;
        let n = self.rows;
        let mut aug = RationalMatrix::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, Rational::one());
        }
        for c in 0..n {
            let p = (c..n)
                .find(|&i| !aug.get(i, c).is_zero())
                .ok_or(ExactError::Singular)?;
            for j in 0..2 * n {
                aug.entries.swap(p * 2 * n + j, c * 2 * n + j);
            }
            let piv = aug.get(c, c).recip();
            for j in 0..2 * n {
                let v = aug.get(c, j) * &piv;
                aug.set(c, j, v);
            }
            for i in 0..n {
                if i == c || aug.get(i, c).is_zero() {
                    continue;
                }
                let f = aug.get(i, c).clone();
                for j in 0..2 * n {
                    let v = aug.get(c, j) * &f;
                    aug.entries[i * 2 * n + j] -= v;
                }
            }
        }
        let mut inv = RationalMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, aug.get(i, n + j).clone());
            }
        }
        Ok(inv)
    }

    /// Basis of the right kernel `{v : M v = 0}` over Q, one vector per free column.
    pub fn kernel(&self) -> Vec<Vec<Rational>> {
        let (mut m, pivots, _) = self.echelon();
        // Back-substitute to reduced row echelon form.
        for (r, &c) in pivots.iter().enumerate().rev() {
            let piv = m.get(r, c).recip();
            for j in 0..m.cols {
                let v = m.get(r, j) * &piv;
                m.set(r, j, v);
            }
            for i in 0..r {
                let f = m.get(i, c).clone();
                if f.is_zero() {
                    continue;
                }
                for j in 0..m.cols {
                    let v = m.get(r, j) * &f;
                    m.entries[i * m.cols + j] -= v;
                }
            }
        }
        let free: Vec<usize> = (0..m.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Rational::zero(); m.cols];
                v[f] = Rational::one();
                for (r, &c) in pivots.iter().enumerate() {
                    v[c] = -m.get(r, f).clone();
                }
                v
            })
            .collect()
    }

    /// `M^k` for any integer `k`; negative powers require invertibility.
    pub fn pow(&self, k: i64) -> Result<Self, ExactError> {
        self.require_square()?;
        let base = if k < 0 { self.inverse()? } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = RationalMatrix::identity(self.rows);
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&b)?;
            }
            e >>= 1;
            if e > 0 {
                b = b.mul(&b)?;
            }
        }
        Ok(acc)
    }

    pub fn trace(&self) -> Rational {
        (0..self.rows.min(self.cols)).fold(Rational::zero(), |acc, i| acc + self.get(i, i))
    }

    /// `det(xI − M)` via the Faddeev–LeVerrier recursion.
    pub fn charpoly(&self) -> Result<Poly, ExactError> {
        self.require_square()?;
        let n = self.rows;
        let mut coeffs = vec![Rational::zero(); n + 1];
        coeffs[n] = Rational::one();
        let mut m_k = RationalMatrix::zeros(n, n);
        for k in 1..=n {
            // M_k = A·M_{k-1} + c_{n-k+1}·I
            m_k = self.mul(&m_k)?.add(&RationalMatrix::identity(n).scale(&coeffs[n - k + 1]))?;
            let tr = self.mul(&m_k)?.trace();
            coeffs[n - k] = -tr / rat(k as i64);
        }
        Ok(Poly::new(coeffs))
    }

    /// `p(M)` by Horner's scheme.
    pub fn eval_poly(&self, p: &Poly) -> Result<Self, ExactError> {
        self.require_square()?;
        let n = self.rows;
        let mut acc = RationalMatrix::zeros(n, n);
        for c in p.coeffs().iter().rev() {
            acc = acc.mul(self)?.add(&RationalMatrix::identity(n).scale(c))?;
        }
        Ok(acc)
    }

    pub fn is_integral(&self) -> bool {
        self.entries.iter().all(|e| e.is_integer())
    }

    pub fn to_integer_rows(&self) -> Option<Vec<Vec<BigInt>>> {
        if !self.is_integral() {
            return None;
        }
        Some(
            (0..self.rows)
                .map(|i| self.row(i).iter().map(|e| e.to_integer()).collect())
                .collect(),
        )
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| to_f64(self.get(i, j)))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }
}

impl fmt::Display for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(format_rational).collect();
            write!(f, "[{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl Serialize for RationalMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = (0..self.rows)
            .map(|i| self.row(i).iter().map(format_rational).collect())
            .collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<String>>::deserialize(d)?;
        let parsed = rows
            .iter()
            .map(|r| r.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(serde::de::Error::custom)?;
        RationalMatrix::from_rows(parsed).map_err(serde::de::Error::custom)
    }
}
