//! Displacement vectors `Δ(x) = (b_1(x) - x, …, b_d(x) - x)` along the orbit
//! `x_k = a^{-k} x_0`, with the one-step relation `Δ(a⁻¹x) ≈ Da⁻¹(y)·AᵀΔ(x)`
//! and the cone test around the unstable direction.

use std::io::{self, Write};

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::action::GroupAction;
use super::DynamicsError;
use crate::groupcore::GroupElement;
use crate::spectral::SpectralSplit;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DisplacementVector {
    pub k: i64,
    pub x: f64,
    pub delta: Vec<f64>,
    pub sup_norm: f64,
    pub norm_star: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DisplacementTrack {
    pub vectors: Vec<DisplacementVector>,
    /// `‖Δ(x_{k+1}) - Da⁻¹(anchor)·AᵀΔ(x_k)‖ / ‖Δ(x_k)‖` (sup norms), one per step.
    pub residuals: Vec<f64>,
    /// `Δ(x_k)/‖Δ(x_k)‖` in the sup norm.
    pub directions: Vec<Vec<f64>>,
    pub anchor: f64,
    pub da_inv_anchor: f64,
    pub cone_eps: f64,
    pub in_cone: Vec<bool>,
    /// First index from which every later direction stays in the cone.
    pub enters_cone_at: Option<usize>,
    /// `‖Δ(x_{k+1})‖_* / (Da⁻¹(anchor)·‖Δ(x_k)‖_*)` per step.
    pub growth: Vec<f64>,
    /// Smallest growth ratio over steps starting inside the cone.
    pub kappa_in_cone: Option<f64>,
}

impl DisplacementTrack {
    pub fn final_direction(&self) -> &[f64] {
        self.directions.last().map(|d| d.as_slice()).unwrap_or(&[])
    }

    /// CSV with columns `k, x, delta_1…delta_d, norm_star, residual`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        let d = self.vectors.first().map_or(0, |v| v.delta.len());
        let mut header = vec!["k".to_string(), "x".to_string()];
        header.extend((1..=d).map(|i| format!("delta_{i}")));
        header.push("norm_star".into());
        header.push("residual".into());
        writeln!(w, "{}", header.join(","))?;
        for (i, v) in self.vectors.iter().enumerate() {
            let mut row = vec![v.k.to_string(), v.x.to_string()];
            row.extend(v.delta.iter().map(|x| x.to_string()));
            row.push(v.norm_star.to_string());
            row.push(self.residuals.get(i).map_or(String::new(), |r| r.to_string()));
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Tracks `Δ(a^{-k} x0)` for `k = 0..=steps`. `anchor` is the fixed point
/// that `a⁻¹` contracts the orbit to, where `Da⁻¹` is taken.
pub fn displacement_track(
    action: &dyn GroupAction,
    split: &SpectralSplit,
    x0: f64,
    steps: usize,
    anchor: f64,
    cone_eps: f64,
) -> Result<DisplacementTrack, DynamicsError> {
    let ctx = action.context();
    let d = ctx.dim();
    let b: Vec<_> = (0..d).map(|i| action.element(&ctx.b_i(i))).collect::<Result<_, _>>()?;
    let a_inv = action.element(&GroupElement::new(-1, ctx.identity().v))?;
    let da = a_inv.derivative(anchor);
    let at: DMatrix<f64> = ctx.matrix().transpose().to_f64();

    let mut vectors = Vec::with_capacity(steps + 1);
    let mut x = x0;
    for k in 0..=steps {
        let delta: Vec<f64> = b.iter().map(|bi| bi.eval(x) - x).collect();
        let dv = DVector::from_column_slice(&delta);
        vectors.push(DisplacementVector { k: k as i64, x, sup_norm: sup(&delta), norm_star: split.norm_star(&dv), delta });
        x = a_inv.eval(x);
    }
    if vectors[0].sup_norm == 0.0 {
        return Err(DynamicsError::DegenerateDisplacement(x0));
    }

    let mut residuals = Vec::with_capacity(steps);
    let mut growth = Vec::with_capacity(steps);
    for w in vectors.windows(2) {
        let cur = DVector::from_column_slice(&w[0].delta);
        let pred = (&at * &cur) * da;
        let diff: Vec<f64> = w[1].delta.iter().zip(pred.iter()).map(|(a, b)| a - b).collect();
        residuals.push(if w[0].sup_norm > 0.0 { sup(&diff) / w[0].sup_norm } else { f64::NAN });
        growth.push(w[1].norm_star / (da * w[0].norm_star));
    }
    let directions: Vec<Vec<f64>> = vectors
        .iter()
        .map(|v| if v.sup_norm > 0.0 { v.delta.iter().map(|x| x / v.sup_norm).collect() } else { v.delta.clone() })
        .collect();
    let in_cone: Vec<bool> = vectors
        .iter()
        .map(|v| {
            let (s, u, _) = split.project(&DVector::from_column_slice(&v.delta));
            u.norm() > 0.0 && s.norm() <= cone_eps * u.norm()
        })
        .collect();
    let enters_cone_at = match in_cone.iter().rposition(|&c| !c) {
        None => Some(0),
        Some(i) if i + 1 < in_cone.len() => Some(i + 1),
        Some(_) => None,
    };
    let kappa_in_cone = growth
        .iter()
        .zip(&in_cone)
        .filter(|(g, &c)| c && g.is_finite())
        .map(|(g, _)| *g)
        .reduce(f64::min);
    Ok(DisplacementTrack {
        vectors,
        residuals,
        directions,
        anchor,
        da_inv_anchor: da,
        cone_eps,
        in_cone,
        enters_cone_at,
        growth,
        kappa_in_cone,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::affinerep::synthesize;
    use crate::dynamics1d::action::chart_conjugate;
    use crate::dynamics1d::chart::Chart;
    use crate::exactmath::RationalMatrix;
    use crate::spectral::splitting;

    #[test]
    fn flat_chart_residual_decreases_toward_anchor() {
        let a = RationalMatrix::from_i64(&[&[2]]);
        let rep = synthesize(&a).unwrap();
        let split = splitting(&a).unwrap();
        let act = chart_conjugate(&rep, Chart::MtFlat);
        let tr = displacement_track(&act, &split, 0.9, 12, 0.5, 0.2).unwrap();
        assert!(tr.residuals[9] < tr.residuals[0], "{:?}", tr.residuals);
        assert_eq!(tr.enters_cone_at, Some(0));
        assert!(tr.kappa_in_cone.unwrap() > 1.0);
        let mut out = Vec::new();
        tr.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with("k,x,delta_1,norm_star,residual\n"));
        assert_eq!(text.lines().count(), 14);
    }
}
