//! Rotation vectors allowed by `a b^v a⁻¹ = b^{Av}` and rotation numbers of
//! circle lifts.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;

use super::ConstructionError;
use crate::dynamics1d::{Domain, IntervalMap};
use crate::exactmath::rational::format_rational;
use crate::exactmath::smith::int_det;
use crate::exactmath::{smith_normal_form, Rational, RationalMatrix};

/// `((Aᵀ - I)^{-1} Z^d) / Z^d ≅ Z^d / (Aᵀ - I) Z^d`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RotationGroup {
    /// `Aᵀ - I` as integer rows.
    pub matrix: Vec<Vec<String>>,
    /// Invariant factors `d_i > 1` of the Smith form.
    pub invariant_factors: Vec<String>,
    pub order: String,
    pub det: String,
    /// Coset representatives `v ∈ [0,1)^d` when the order is at most 64.
    #[serde(serialize_with = "ser_reps")]
    pub representatives: Option<Vec<Vec<Rational>>>,
}

fn ser_reps<S: serde::Serializer>(r: &Option<Vec<Vec<Rational>>>, s: S) -> Result<S::Ok, S::Error> {
    let strings: Option<Vec<Vec<String>>> = r.as_ref().map(|vs| vs.iter().map(|v| v.iter().map(format_rational).collect()).collect());
    serde::Serialize::serialize(&strings, s)
}

fn ser_opt_rational<S: serde::Serializer>(r: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
    serde::Serialize::serialize(&r.as_ref().map(format_rational), s)
}

impl RotationGroup {
    pub fn order_int(&self) -> BigInt {
        self.order.parse().expect("order is an integer")
    }
}

const ENUMERATION_LIMIT: u64 = 64;

pub fn rotation_vector_group(a: &RationalMatrix) -> Result<RotationGroup, ConstructionError> {
    if !a.is_square() {
        return Err(ConstructionError::Precondition("matrix must be square".into()));
    }
    let d = a.rows();
    let m = a.transpose().sub(&RationalMatrix::identity(d))?;
    let rows = m.to_integer_rows().ok_or_else(|| {
        ConstructionError::Precondition("A is not integral: the rotation vectors do not form a finite group over Z^d".into())
    })?;
    let det = int_det(&rows);
    if det.is_zero() {
        return Err(ConstructionError::InfiniteFamily);
    }
    let snf = smith_normal_form(&rows);
    let order = det.abs();
    let representatives = if order <= BigInt::from(ENUMERATION_LIMIT) { Some(enumerate(&m, &snf)?) } else { None };
    Ok(RotationGroup {
        matrix: rows.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect(),
        invariant_factors: snf.invariant_factors().iter().map(|x| x.to_string()).collect(),
        order: order.to_string(),
        det: det.to_string(),
        representatives,
    })
}

/// `M^{-1} U^{-1} e mod Z^d` for `e_i ∈ [0, d_i)`, sorted.
fn enumerate(m: &RationalMatrix, snf: &crate::exactmath::SmithDecomposition) -> Result<Vec<Vec<Rational>>, ConstructionError> {
    let d = m.rows();
    let diag = snf.diagonal();
    let u = RationalMatrix::from_rows(snf.u.iter().map(|r| r.iter().map(|x| Rational::from_integer(x.clone())).collect()).collect())?;
    let u_inv = u.inverse()?;
    let m_inv = m.inverse()?;
    let mut out = Vec::new();
    let mut e = vec![BigInt::zero(); d];
    loop {
        let ev: Vec<Rational> = e.iter().map(|x| Rational::from_integer(x.clone())).collect();
        let v = m_inv.mul_vec(&u_inv.mul_vec(&ev)?)?;
        out.push(v.iter().map(|x| x - x.floor()).collect::<Vec<_>>());
        let mut i = 0;
        while i < d {
            e[i] += 1;
            if e[i] < diag[i] {
                break;
            }
            e[i] = BigInt::zero();
            i += 1;
        }
        if i == d {
            break;
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RotationEstimate {
    pub value: f64,
    pub error_bar: f64,
    pub iterates: u64,
    /// Smallest-denominator `p/q`, `q ≤ 100`, inside the error bar.
    #[serde(serialize_with = "ser_opt_rational")]
    pub nearest_small_rational: Option<Rational>,
}

/// `F^N(0)/N` with error bar `2/N`.
pub fn rotation_number_estimate(lift: &IntervalMap, iterates: u64) -> Result<RotationEstimate, ConstructionError> {
    if iterates == 0 {
        return Err(ConstructionError::Precondition("need at least one iterate".into()));
    }
    if lift.domain() != Domain::CircleLift {
        return Err(ConstructionError::Precondition(format!("{} is not a circle lift", lift.provenance())));
    }
    let check = lift.check(1000);
    if !check.ok {
        return Err(ConstructionError::Precondition(format!(
            "lift check failed: monotone = {}, sup|F(x+1) - F(x) - 1| = {:?}",
            check.monotone, check.lift_error
        )));
    }
    let mut x = 0.0f64;
    let mut turns = 0.0f64;
    for _ in 0..iterates {
        x = lift.eval(x);
        // Keep x in [0,1) and count whole turns separately to avoid growth of x.
        let m = x.floor();
        turns += m;
        x -= m;
    }
    let value = (turns + x) / iterates as f64;
    let error_bar = 2.0 / iterates as f64;
    let nearest_small_rational = (1..=100i64).find_map(|q| {
        let p = (value * q as f64).round();
        ((value - p / q as f64).abs() < error_bar).then(|| Rational::new(BigInt::from(p as i64), BigInt::from(q)))
    });
    Ok(RotationEstimate { value, error_bar, iterates, nearest_small_rational })
}
