//! Affine representations `ψ: Z ⋉_A Q^d → Aff₊(R)` with exact coefficients in Q(λ).
//!
//! `ψ(a) = x ↦ λx` and `ψ(b^v) = x ↦ x + ⟨t, v⟩` where `Aᵀt = λt`, so
//! `ψ(a^k b^v)(x) = λ^k (x + ⟨t, v⟩)`.

use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use crate::exactmath::numfield::{field_mat_vec, field_solve, NfElem, NumberField};
use crate::exactmath::rational::{format_rational, lcm_of_denominators};
use crate::exactmath::{ExactError, IsolatingInterval, Poly, Rational, RationalMatrix};
use crate::groupcore::{GroupContext, GroupElement, GroupError};
use crate::spectral::{classify, SpectralError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RepError {
    #[error("A has no positive real eigenvalue, so every affine representation has abelian image")]
    NoPositiveRealEigenvalue,
    #[error("the only positive real eigenvalue is 1; ψ(a) would be a translation")]
    DegenerateEigenvalue,
    #[error("eigenvector check Aᵀt = λt failed")]
    EigenEquation,
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// `x ↦ slope·x + offset` over Q(λ).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineMap {
    pub slope: NfElem,
    pub offset: NfElem,
}

impl AffineMap {
    pub fn identity(field: &Arc<NumberField>) -> Self {
        AffineMap { slope: NfElem::one(field), offset: NfElem::zero(field) }
    }

    /// `self ∘ other`
    pub fn compose(&self, other: &AffineMap) -> Result<AffineMap, ExactError> {
        Ok(AffineMap {
            slope: self.slope.mul(&other.slope)?,
            offset: self.slope.mul(&other.offset)?.add(&self.offset)?,
        })
    }

    pub fn inverse(&self) -> Result<AffineMap, ExactError> {
        let s = self.slope.inv()?;
        Ok(AffineMap { offset: s.mul(&self.offset)?.neg(), slope: s })
    }

    pub fn apply(&self, x: &NfElem) -> Result<NfElem, ExactError> {
        self.slope.mul(x)?.add(&self.offset)
    }

    pub fn apply_f64(&self, x: f64) -> f64 {
        self.slope.to_f64() * x + self.offset.to_f64()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FaithfulnessCertificate {
    pub faithful: bool,
    /// Rank over Q of the matrix whose rows are the power-basis coordinates of the `t_i`.
    pub rank: usize,
    /// Nonzero integer `v` with `⟨t, v⟩ = 0` when unfaithful; `b^v` is then in the kernel.
    pub witness: Option<Vec<String>>,
}

#[derive(Clone, Debug)]
pub struct AffineRepresentation {
    ctx: GroupContext,
    field: Arc<NumberField>,
    lambda: NfElem,
    t: Vec<NfElem>,
}

impl AffineRepresentation {
    /// Assembles a representation without checking the eigen-equation.
    /// Meant for negative controls.
    pub fn from_parts(ctx: GroupContext, lambda: NfElem, t: Vec<NfElem>) -> Self {
        AffineRepresentation { field: lambda.field().clone(), ctx, lambda, t }
    }

    pub fn context(&self) -> &GroupContext {
        &self.ctx
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn lambda(&self) -> &NfElem {
        &self.lambda
    }

    pub fn t(&self) -> &[NfElem] {
        &self.t
    }

    /// `⟨t, v⟩`
    pub fn pairing(&self, v: &[Rational]) -> Result<NfElem, ExactError> {
        self.t
            .iter()
            .zip(v)
            .try_fold(NfElem::zero(&self.field), |acc, (ti, vi)| acc.add(&ti.scale(vi)))
    }

    /// `ψ(a^k b^v) = x ↦ λ^k x + λ^k ⟨t, v⟩`.
    pub fn evaluate(&self, g: &GroupElement) -> Result<AffineMap, RepError> {
        if g.v.len() != self.ctx.dim() {
            return Err(GroupError::Dimension { expected: self.ctx.dim(), got: g.v.len() }.into());
        }
        let lk = self.lambda.pow(g.k)?;
        let shift = self.pairing(&g.v)?;
        Ok(AffineMap { offset: lk.mul(&shift)?, slope: lk })
    }

    /// Binary64 evaluation of `ψ(g)(x)` without building the exact map.
    pub fn evaluate_f64(&self, g: &GroupElement, x: f64) -> f64 {
        let l = self.lambda.to_f64();
        let shift: f64 = self
            .t
            .iter()
            .zip(&g.v)
            .map(|(ti, vi)| ti.to_f64() * crate::exactmath::rational::to_f64(vi))
            .sum();
        l.powi(g.k as i32) * (x + shift)
    }

    pub fn lambda_f64(&self) -> f64 {
        self.lambda.to_f64()
    }

    pub fn t_f64(&self) -> Vec<f64> {
        self.t.iter().map(|e| e.to_f64()).collect()
    }

    /// `Aᵀt = λt`, checked exactly.
    pub fn eigen_equation_holds(&self) -> bool {
        let at = self.ctx.matrix().transpose();
        let m: Vec<Vec<NfElem>> = (0..at.rows())
            .map(|i| (0..at.cols()).map(|j| NfElem::from_rational(&self.field, at.get(i, j))).collect())
            .collect();
        match field_mat_vec(&m, &self.t) {
            Ok(lhs) => lhs
                .iter()
                .zip(&self.t)
                .all(|(l, ti)| self.lambda.mul(ti).is_ok_and(|r| &r == l)),
            Err(_) => false,
        }
    }

    /// Faithful iff the `t_i` are linearly independent over Q.
    pub fn faithfulness_certificate(&self) -> FaithfulnessCertificate {
        let d = self.t.len();
        let rows: Vec<Vec<Rational>> = self.t.iter().map(|ti| ti.coords().to_vec()).collect();
        let c = RationalMatrix::from_rows(rows).expect("rectangular");
        let rank = c.rank();
        if rank == d {
            return FaithfulnessCertificate { faithful: true, rank, witness: None };
        }
        let ker = c.transpose().kernel();
        let v = ker.first().cloned().expect("rank deficiency gives a kernel vector");
        let l = lcm_of_denominators(v.iter());
        let scaled: Vec<Rational> = v.iter().map(|x| x * Rational::from_integer(l.clone())).collect();
        FaithfulnessCertificate {
            faithful: false,
            rank,
            witness: Some(scaled.iter().map(format_rational).collect()),
        }
    }

    pub fn report(&self) -> RepresentationReport {
        RepresentationReport {
            minimal_polynomial: self.field.minpoly.clone(),
            interval: self.field.interval.clone(),
            lambda_approx: self.lambda_f64(),
            t: self.t.iter().map(|e| e.coords_strings()).collect(),
            t_approx: self.t_f64(),
            eigen_equation_exact: self.eigen_equation_holds(),
            faithfulness: self.faithfulness_certificate(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RepresentationReport {
    pub minimal_polynomial: Poly,
    pub interval: IsolatingInterval,
    pub lambda_approx: f64,
    /// Power-basis coordinates of each `t_i`.
    pub t: Vec<Vec<String>>,
    pub t_approx: Vec<f64>,
    pub eigen_equation_exact: bool,
    pub faithfulness: FaithfulnessCertificate,
}

/// Builds ψ from the largest positive real eigenvalue λ of A, with `t` the
/// eigenvector of Aᵀ whose first nonzero coordinate is 1.
pub fn synthesize(a: &RationalMatrix) -> Result<AffineRepresentation, RepError> {
    let ctx = GroupContext::new(a.clone())?;
    let class = classify(a)?;
    let chosen = class.chosen_lambda.ok_or(RepError::NoPositiveRealEigenvalue)?;
    if chosen.minpoly == Poly::from_i64(&[-1, 1]) {
        return Err(RepError::DegenerateEigenvalue);
    }
    let field = NumberField::new(&chosen.minpoly, chosen.interval)?;
    let lambda = NfElem::generator(&field);
    let at = a.transpose();
    let d = a.rows();
    let m: Vec<Vec<NfElem>> = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    let e = NfElem::from_rational(&field, at.get(i, j));
                    if i == j {
                        e.sub(&lambda).expect("same field")
                    } else {
                        e
                    }
                })
                .collect()
        })
        .collect();
    let ker = field_solve(&m)?;
    let t = ker.into_iter().next().ok_or(RepError::EigenEquation)?;
    let pivot = t.iter().find(|e| !e.is_zero()).cloned().ok_or(RepError::EigenEquation)?;
    let inv = pivot.inv()?;
    let t: Vec<NfElem> = t.iter().map(|e| e.mul(&inv)).collect::<Result<_, _>>()?;
    let rep = AffineRepresentation { ctx, field, lambda, t };
    if !rep.eigen_equation_holds() {
        return Err(RepError::EigenEquation);
    }
    Ok(rep)
}

/// Random group element with `|k| ≤ max_k` and entries `p/q` with `|p|, q ≤ height`.
pub fn random_element<R: Rng>(rng: &mut R, d: usize, max_k: i64, height: i64) -> GroupElement {
    let k = rng.gen_range(-max_k..=max_k);
    let v = (0..d)
        .map(|_| Rational::new(rng.gen_range(-height..=height).into(), rng.gen_range(1..=height).into()))
        .collect();
    GroupElement::new(k, v)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomomorphismReport {
    pub trials: usize,
    pub violations: usize,
    /// Equality is exact in Q(λ); there is no tolerance.
    pub exact: bool,
}

/// Checks `ψ(g1 g2) = ψ(g1) ∘ ψ(g2)` exactly on random pairs.
pub fn homomorphism_check<R: Rng>(
    rep: &AffineRepresentation,
    trials: usize,
    rng: &mut R,
) -> Result<HomomorphismReport, RepError> {
    let d = rep.ctx.dim();
    let mut violations = 0;
    for _ in 0..trials {
        let g1 = random_element(rng, d, 4, 10);
        let g2 = random_element(rng, d, 4, 10);
        let lhs = rep.evaluate(&rep.ctx.multiply(&g1, &g2)?)?;
        let rhs = rep.evaluate(&g1)?.compose(&rep.evaluate(&g2)?)?;
        if lhs != rhs {
            violations += 1;
        }
    }
    Ok(HomomorphismReport { trials, violations, exact: true })
}

/// True when every `t_i` is zero, i.e. ψ has abelian (homothety-only) image.
pub fn translation_part_trivial(rep: &AffineRepresentation) -> bool {
    rep.t.iter().all(|e| e.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::{rat, ratio};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn bs12_standard_action() {
        let rep = synthesize(&RationalMatrix::from_i64(&[&[2]])).unwrap();
        let ctx = rep.context().clone();
        let a = rep.evaluate(&ctx.a()).unwrap();
        let b = rep.evaluate(&ctx.b_i(0)).unwrap();
        assert_eq!(a.slope.as_rational(), Some(rat(2)));
        assert_eq!(a.offset.as_rational(), Some(rat(0)));
        assert_eq!(b.slope.as_rational(), Some(rat(1)));
        assert_eq!(b.offset.as_rational(), Some(rat(1)));
        let ab = rep.evaluate(&ctx.multiply(&ctx.a(), &ctx.b_i(0)).unwrap()).unwrap();
        assert_eq!(ab, a.compose(&b).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(homomorphism_check(&rep, 500, &mut rng).unwrap().violations, 0);
    }

    #[test]
    fn no_positive_real_eigenvalue() {
        let r = synthesize(&RationalMatrix::from_i64(&[&[1, -1], &[1, 1]]));
        assert_eq!(r.unwrap_err(), RepError::NoPositiveRealEigenvalue);
        let r = synthesize(&RationalMatrix::from_i64(&[&[1]]));
        assert_eq!(r.unwrap_err(), RepError::DegenerateEigenvalue);
    }

    #[test]
    fn fibonacci() {
        let rep = synthesize(&RationalMatrix::from_i64(&[&[0, 1], &[1, 1]])).unwrap();
        let l = rep.lambda().clone();
        assert!((rep.lambda_f64() - (1.0 + 5f64.sqrt()) / 2.0).abs() < 1e-15);
        // oracle: back-substitution Aᵀt = λt
        assert!(rep.t()[0].is_one());
        assert_eq!(rep.t()[1], l);
        assert_eq!(l.mul(&rep.t()[0]).unwrap(), rep.t()[1]);
        assert_eq!(l.mul(&rep.t()[1]).unwrap(), rep.t()[0].add(&rep.t()[1]).unwrap());
        let cert = rep.faithfulness_certificate();
        assert!(cert.faithful);
        assert_eq!(cert.rank, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        assert_eq!(homomorphism_check(&rep, 500, &mut rng).unwrap().violations, 0);
    }

    #[test]
    fn unfaithful_diagonal() {
        let rep = synthesize(&RationalMatrix::diagonal(&[rat(2), rat(2)])).unwrap();
        assert!(rep.t()[0].is_one() && rep.t()[1].is_zero());
        let cert = rep.faithfulness_certificate();
        assert!(!cert.faithful);
        assert_eq!(cert.witness, Some(vec!["0".to_string(), "1".to_string()]));
    }

    #[test]
    fn corrupted_t_is_detected() {
        let good = synthesize(&RationalMatrix::from_i64(&[&[0, 1], &[1, 1]])).unwrap();
        let mut t = good.t().to_vec();
        t[1] = t[1].add(&NfElem::one(good.field())).unwrap();
        let bad = AffineRepresentation::from_parts(good.context().clone(), good.lambda().clone(), t);
        assert!(!bad.eigen_equation_holds());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!(homomorphism_check(&bad, 50, &mut rng).unwrap().violations > 0);
    }

    #[test]
    fn float_evaluation_matches_exact() {
        let rep = synthesize(&RationalMatrix::from_i64(&[&[0, 1], &[1, 1]])).unwrap();
        let g = GroupElement::new(-3, vec![ratio(7, 3), ratio(-5, 2)]);
        let exact = rep.evaluate(&g).unwrap();
        let x = 0.3;
        let want = exact.apply(&NfElem::from_rational(rep.field(), &crate::exactmath::rational::from_f64(x))).unwrap().to_f64();
        let got = rep.evaluate_f64(&g, x);
        assert!((got - want).abs() <= 1e-12 * want.abs());
        assert!((exact.apply_f64(x) - want).abs() <= 1e-12 * want.abs());
        assert!(!translation_part_trivial(&rep));
        let inv = exact.inverse().unwrap();
        assert_eq!(inv.compose(&exact).unwrap(), AffineMap::identity(rep.field()));
    }
}
