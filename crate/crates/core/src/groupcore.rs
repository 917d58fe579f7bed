//! Normal forms in `G = Z ⋉_A Q^d`.
//!
//! An element is written `a^k b^v` with the power of `a` on the left, where
//! `b^v = b_1^{v_1} ⋯ b_d^{v_d}` and conjugation by `a` acts on exponent
//! vectors as `A`: `a b^v a^{-1} = b^{A v}`. Hence `b^v a^k = a^k b^{A^{-k} v}`.

use serde::{Deserialize, Serialize};

use crate::exactmath::rational::serde_rational;
use crate::exactmath::{ExactError, RationalMatrix, Rational};
use num_traits::Zero;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GroupError {
    #[error("matrix must be square, got {0}x{1}")]
    NotSquare(usize, usize),
    #[error("matrix is not invertible")]
    Singular,
    #[error("element has dimension {got}, context has dimension {expected}")]
    Dimension { expected: usize, got: usize },
    #[error(transparent)]
    Exact(#[from] ExactError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupContext {
    a: RationalMatrix,
    #[serde(skip)]
    a_inv: RationalMatrix,
}

impl GroupContext {
    pub fn new(a: RationalMatrix) -> Result<Self, GroupError> {
        if !a.is_square() {
            return Err(GroupError::NotSquare(a.rows(), a.cols()));
        }
        let a_inv = a.inverse().map_err(|_| GroupError::Singular)?;
        Ok(GroupContext { a, a_inv })
    }

    pub fn matrix(&self) -> &RationalMatrix {
        &self.a
    }

    pub fn dim(&self) -> usize {
        self.a.rows()
    }

    /// `A^k v` for any integer `k`.
    pub fn act(&self, k: i64, v: &[Rational]) -> Vec<Rational> {
        let m = if k >= 0 { &self.a } else { &self.a_inv };
        let mut out = v.to_vec();
        for _ in 0..k.unsigned_abs() {
            out = m.mul_vec(&out).expect("dimension checked");
        }
        out
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement { k: 0, v: vec![Rational::zero(); self.dim()] }
    }

    /// The generator `a`.
    pub fn a(&self) -> GroupElement {
        GroupElement { k: 1, v: vec![Rational::zero(); self.dim()] }
    }

    /// `b^v`.
    pub fn b(&self, v: Vec<Rational>) -> GroupElement {
        GroupElement { k: 0, v }
    }

    /// The generator `b_i` (zero-based).
    pub fn b_i(&self, i: usize) -> GroupElement {
        let mut v = vec![Rational::zero(); self.dim()];
        v[i] = Rational::from_integer(1.into());
        GroupElement { k: 0, v }
    }

    fn check(&self, g: &GroupElement) -> Result<(), GroupError> {
        if g.v.len() != self.dim() {
            return Err(GroupError::Dimension { expected: self.dim(), got: g.v.len() });
        }
        Ok(())
    }

    /// `a^{k1} b^{v1} · a^{k2} b^{v2} = a^{k1+k2} b^{A^{-k2} v1 + v2}`.
    pub fn multiply(&self, g1: &GroupElement, g2: &GroupElement) -> Result<GroupElement, GroupError> {
        self.check(g1)?;
        self.check(g2)?;
        let moved = self.act(-g2.k, &g1.v);
        let v = moved.iter().zip(&g2.v).map(|(x, y)| x + y).collect();
        Ok(GroupElement { k: g1.k + g2.k, v })
    }

    pub fn multiply_all(&self, gs: &[GroupElement]) -> Result<GroupElement, GroupError> {
        gs.iter()
            .try_fold(self.identity(), |acc, g| self.multiply(&acc, g))
    }

    /// `(a^k b^v)^{-1} = a^{-k} b^{-A^k v}`.
    pub fn invert(&self, g: &GroupElement) -> Result<GroupElement, GroupError> {
        self.check(g)?;
        let v = self.act(g.k, &g.v).into_iter().map(|x| -x).collect();
        Ok(GroupElement { k: -g.k, v })
    }

    pub fn power(&self, g: &GroupElement, n: i64) -> Result<GroupElement, GroupError> {
        let base = if n < 0 { self.invert(g)? } else { g.clone() };
        let mut acc = self.identity();
        for _ in 0..n.unsigned_abs() {
            acc = self.multiply(&acc, &base)?;
        }
        Ok(acc)
    }

    /// Checks the defining relations with the built-in multiplication.
    pub fn verify_relations(&self) -> RelationReport {
        self.verify_relations_with(|x, y| self.multiply(x, y).expect("same context"))
    }

    /// Checks `b_i b_j = b_j b_i` and `a b_i a^{-1} = b^{A e_i}` using the
    /// supplied multiplication, so that a faulty implementation can be audited.
    pub fn verify_relations_with<F>(&self, mul: F) -> RelationReport
    where
        F: Fn(&GroupElement, &GroupElement) -> GroupElement,
    {
        let d = self.dim();
        let mut relations = Vec::new();
        for i in 0..d {
            for j in i + 1..d {
                let lhs = mul(&self.b_i(i), &self.b_i(j));
                let rhs = mul(&self.b_i(j), &self.b_i(i));
                relations.push(RelationCheck { name: format!("b{}b{}=b{}b{}", i + 1, j + 1, j + 1, i + 1), holds: lhs == rhs });
            }
        }
        let a_inv = GroupElement { k: -1, v: vec![Rational::zero(); d] };
        for i in 0..d {
            let lhs = mul(&mul(&self.a(), &self.b_i(i)), &a_inv);
            let rhs = self.b(self.a.column(i));
            relations.push(RelationCheck { name: format!("a b{} a^-1 = b^(A e{})", i + 1, i + 1), holds: lhs == rhs });
        }
        let all_hold = relations.iter().all(|r| r.holds);
        RelationReport { relations, all_hold }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupElement {
    pub k: i64,
    #[serde(with = "serde_rational::vec")]
    pub v: Vec<Rational>,
}

impl GroupElement {
    pub fn new(k: i64, v: Vec<Rational>) -> Self {
        GroupElement { k, v }
    }

    pub fn is_identity(&self) -> bool {
        self.k == 0 && self.v.iter().all(|x| x.is_zero())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelationCheck {
    pub name: String,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelationReport {
    pub relations: Vec<RelationCheck>,
    pub all_hold: bool,
}
