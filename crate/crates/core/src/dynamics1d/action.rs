use serde::Serialize;

use super::chart::Chart;
use super::map::{Domain, IntervalMap};
use super::DynamicsError;
use crate::affinerep::AffineRepresentation;
use crate::exactmath::rational::to_f64;
use crate::groupcore::{GroupContext, GroupElement};

/// A homomorphism from `Z ⋉_A Q^d` into evaluable homeomorphisms.
pub trait GroupAction: Send + Sync {
    fn context(&self) -> &GroupContext;
    fn domain(&self) -> Domain;
    fn element(&self, g: &GroupElement) -> Result<IntervalMap, DynamicsError>;
    fn name(&self) -> String;
}

/// The affine action `ψ` moved to `(0,1)` by a chart, or left on the line.
#[derive(Clone, Debug)]
pub struct ChartAction {
    rep: AffineRepresentation,
    chart: Option<Chart>,
    lambda: f64,
    t: Vec<f64>,
}

pub fn chart_conjugate(rep: &AffineRepresentation, chart: Chart) -> ChartAction {
    ChartAction::new(rep, Some(chart))
}

impl ChartAction {
    pub fn new(rep: &AffineRepresentation, chart: Option<Chart>) -> Self {
        ChartAction { rep: rep.clone(), chart, lambda: rep.lambda_f64(), t: rep.t_f64() }
    }

    pub fn rep(&self) -> &AffineRepresentation {
        &self.rep
    }

    pub fn chart(&self) -> Option<Chart> {
        self.chart
    }

    /// `(λ^k, λ^k⟨t,v⟩)` in binary64.
    pub fn coefficients(&self, g: &GroupElement) -> (f64, f64) {
        let lk = self.lambda.powi(g.k as i32);
        let shift: f64 = self.t.iter().zip(&g.v).map(|(t, v)| t * to_f64(v)).sum();
        (lk, lk * shift)
    }
}

fn affine_map(chart: Option<Chart>, slope: f64, offset: f64, provenance: String) -> IntervalMap {
    let (si, oi) = (1.0 / slope, -offset / slope);
    match chart {
        None => IntervalMap::new(Domain::Line, provenance, move |x| slope * x + offset)
            .with_inverse(move |y| si * y + oi)
            .with_derivative(move |_| slope),
        Some(c) => IntervalMap::new(Domain::Unit, provenance, move |u| c.conjugate_affine(slope, offset, u))
            .with_inverse(move |u| c.conjugate_affine(si, oi, u))
            .with_derivative(move |u| c.conjugate_affine_derivative(slope, offset, u)),
    }
}

impl GroupAction for ChartAction {
    fn context(&self) -> &GroupContext {
        self.rep.context()
    }

    fn domain(&self) -> Domain {
        if self.chart.is_some() {
            Domain::Unit
        } else {
            Domain::Line
        }
    }

    fn element(&self, g: &GroupElement) -> Result<IntervalMap, DynamicsError> {
        if g.v.len() != self.context().dim() {
            return Err(DynamicsError::InvalidElement(format!("expected {} coordinates, got {}", self.context().dim(), g.v.len())));
        }
        let (slope, offset) = self.coefficients(g);
        Ok(affine_map(self.chart, slope, offset, self.name()))
    }

    fn name(&self) -> String {
        match self.chart {
            Some(c) => format!("affine/{}", c.name()),
            None => "affine".into(),
        }
    }
}

/// `n` equally spaced points strictly inside `(lo, hi)`.
pub fn interior_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (1..=n).map(|i| lo + (hi - lo) * i as f64 / (n + 1) as f64).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RelationResidual {
    pub name: String,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RelationResiduals {
    pub relations: Vec<RelationResidual>,
    pub max: f64,
}

fn sup_diff(f: &IntervalMap, g: &IntervalMap, grid: &[f64]) -> f64 {
    grid.iter().map(|&x| (f.eval(x) - g.eval(x)).abs()).fold(0.0, f64::max)
}

/// Sup-grid residuals of `b_i b_j = b_j b_i` and `a b_i a⁻¹ = b^{A e_i}`, with
/// every map built separately from its own group element.
pub fn relation_residuals(action: &dyn GroupAction, grid: &[f64]) -> Result<RelationResiduals, DynamicsError> {
    let ctx = action.context();
    let d = ctx.dim();
    let b: Vec<IntervalMap> = (0..d).map(|i| action.element(&ctx.b_i(i))).collect::<Result<_, _>>()?;
    let a = action.element(&ctx.a())?;
    let a_inv = action.element(&GroupElement::new(-1, ctx.identity().v))?;
    let mut relations = Vec::new();
    for i in 0..d {
        for j in i + 1..d {
            let r = sup_diff(&b[i].compose(&b[j]), &b[j].compose(&b[i]), grid);
            relations.push(RelationResidual { name: format!("b{}b{}=b{}b{}", i + 1, j + 1, j + 1, i + 1), residual: r });
        }
    }
    for (i, bi) in b.iter().enumerate() {
        let rhs = action.element(&ctx.b(ctx.matrix().column(i)))?;
        let lhs = a.compose(bi).compose(&a_inv);
        relations.push(RelationResidual {
            name: format!("a b{} a^-1 = b^(A e{})", i + 1, i + 1),
            residual: sup_diff(&lhs, &rhs, grid),
        });
    }
    let max = relations.iter().map(|r| r.residual).fold(0.0, f64::max);
    Ok(RelationResiduals { relations, max })
}

/// `sup |ψ(g1 g2)(x) - ψ(g1)(ψ(g2)(x))|` on the grid.
pub fn homomorphism_residual(
    action: &dyn GroupAction,
    g1: &GroupElement,
    g2: &GroupElement,
    grid: &[f64],
) -> Result<f64, DynamicsError> {
    let ctx = action.context();
    let prod = ctx.multiply(g1, g2).map_err(|e| DynamicsError::InvalidElement(e.to_string()))?;
    let lhs = action.element(&prod)?;
    let rhs = action.element(g1)?.compose(&action.element(g2)?);
    Ok(sup_diff(&lhs, &rhs, grid))
}
