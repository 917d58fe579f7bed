//! Translation coordinate of an action semiconjugate to an affine one:
//! `F(x) ≈ sup{⟨t, v⟩ : b^v(base) ≤ x}` over a finite set of exponents `v`.
//! Between close orbit points `F` is interpolated linearly; across a gap
//! wider than `plateau_min` it is constant.

use serde::Serialize;

use super::action::GroupAction;
use super::DynamicsError;
use crate::affinerep::AffineRepresentation;
use crate::exactmath::Rational;
use crate::groupcore::GroupElement;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExtractOptions {
    /// Bound on `|v_i|` and on the first denominator scale.
    pub height: i64,
    pub max_level: u32,
    /// Cap on the number of exponent vectors per level.
    pub budget: usize,
    /// Gaps between orbit points wider than this are reported as plateaus.
    pub plateau_min: f64,
    /// Refinement stops once every gap is below this.
    pub gap_target: f64,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        ExtractOptions { height: 64, max_level: 10, budget: 200_000, plateau_min: 1e-3, gap_target: 2.5e-4 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoordinateFunction {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    /// Intervals between consecutive orbit points on which `F` is constant.
    pub plateaus: Vec<(f64, f64)>,
    pub level: u32,
    pub denominator: u64,
    pub orbit_points: usize,
    pub max_gap: f64,
}

impl CoordinateFunction {
    pub fn is_monotone(&self) -> bool {
        self.values.windows(2).all(|w| w[1] >= w[0])
    }

    pub fn widest_plateau(&self) -> f64 {
        self.plateaus.iter().map(|(a, b)| b - a).fold(0.0, f64::max)
    }

    fn index_of(&self, x: f64) -> usize {
        let i = self.grid.partition_point(|&g| g < x).min(self.grid.len() - 1);
        if i > 0 && (x - self.grid[i - 1]).abs() < (self.grid[i] - x).abs() {
            i - 1
        } else {
            i
        }
    }

    /// `αF + β` matching `reference` at the grid points nearest the two pins.
    pub fn normalized(&self, reference: impl Fn(f64) -> f64, pins: (f64, f64)) -> Vec<f64> {
        let (ia, ib) = (self.index_of(pins.0), self.index_of(pins.1));
        let (fa, fb) = (self.values[ia], self.values[ib]);
        let (ra, rb) = (reference(self.grid[ia]), reference(self.grid[ib]));
        let alpha = (rb - ra) / (fb - fa);
        self.values.iter().map(|f| ra + alpha * (f - fa)).collect()
    }

    /// `sup |normalized F - reference|` on the grid.
    pub fn pinned_error(&self, reference: impl Fn(f64) -> f64, pins: (f64, f64)) -> f64 {
        let n = self.normalized(&reference, pins);
        self.grid.iter().zip(&n).map(|(&x, f)| (f - reference(x)).abs()).fold(0.0, f64::max)
    }
}

fn denominator_base(action: &dyn GroupAction) -> u64 {
    let a = action.context().matrix();
    if a.rows() == 1 && a.is_integral() {
        let n = a.get(0, 0).to_integer();
        if let Ok(n) = u64::try_from(n.magnitude()) {
            if n >= 2 {
                return n;
            }
        }
    }
    2
}

fn exponent_vectors(d: usize, den: u64, height: i64, budget: usize) -> Vec<Vec<Rational>> {
    let per_axis = (budget as f64).powf(1.0 / d as f64).floor() as i64;
    let m = ((per_axis - 1) / 2).min(height.saturating_mul(den as i64)).max(1);
    let mut out = Vec::new();
    let mut idx = vec![-m; d];
    loop {
        out.push(idx.iter().map(|&p| Rational::new(p.into(), (den as i64).into())).collect());
        let mut i = 0;
        while i < d {
            idx[i] += 1;
            if idx[i] <= m {
                break;
            }
            idx[i] = -m;
            i += 1;
        }
        if i == d {
            break;
        }
    }
    out
}

/// Builds `F` on `grid` (sorted), refining the exponent set until the orbit
/// of `base` has no gap wider than `gap_target` or the level cap is hit.
pub fn conjugacy_extract(
    action: &dyn GroupAction,
    rep: &AffineRepresentation,
    base: f64,
    grid: &[f64],
    opts: &ExtractOptions,
) -> Result<CoordinateFunction, DynamicsError> {
    if !rep.faithfulness_certificate().faithful {
        return Err(DynamicsError::Unsupported("translation image is not dense (representation is not faithful)".into()));
    }
    if grid.len() < 2 {
        return Err(DynamicsError::Precondition("grid needs at least two points".into()));
    }
    let d = action.context().dim();
    let t = rep.t_f64();
    let nb = denominator_base(action);
    let (lo, hi) = (grid[0], grid[grid.len() - 1]);
    let mut level = 0;
    let mut den = 1u64;
    loop {
        let mut pts: Vec<(f64, f64)> = Vec::new();
        for v in exponent_vectors(d, den, opts.height, opts.budget) {
            let c: f64 = t.iter().zip(&v).map(|(ti, vi)| ti * crate::exactmath::rational::to_f64(vi)).sum();
            let p = action.element(&GroupElement::new(0, v))?.eval(base);
            if p.is_finite() {
                pts.push((p, c));
            }
        }
        pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        let inside: Vec<f64> = pts.iter().map(|p| p.0).filter(|&p| p >= lo && p <= hi).collect();
        let gaps: Vec<(f64, f64)> = inside.windows(2).map(|w| (w[0], w[1])).collect();
        let max_gap = gaps.iter().map(|(a, b)| b - a).fold(0.0, f64::max);
        let next_den = den.saturating_mul(nb);
        let next_count = (2 * opts.height as u128 * next_den as u128 + 1).pow(d as u32);
        let done = max_gap <= opts.gap_target || level >= opts.max_level || (d == 1 && next_count > opts.budget as u128);
        if done {
            let n = pts.len();
            let mut prefix = vec![f64::NEG_INFINITY; n];
            let mut suffix = vec![f64::INFINITY; n];
            for i in 0..n {
                prefix[i] = if i == 0 { pts[i].1 } else { prefix[i - 1].max(pts[i].1) };
            }
            for i in (0..n).rev() {
                suffix[i] = if i + 1 == n { pts[i].1 } else { suffix[i + 1].min(pts[i].1) };
            }
            let values = grid
                .iter()
                .map(|&x| {
                    let i = pts.partition_point(|p| p.0 <= x);
                    let left = (i > 0).then(|| prefix[i - 1]);
                    let right = (i < n).then(|| suffix[i]);
                    match (left, right) {
                        (Some(l), Some(r)) => {
                            let (pl, pr) = (pts[i - 1].0, pts[i].0);
                            if pr > pl && pr - pl <= opts.plateau_min {
                                l + (r.max(l) - l) * (x - pl) / (pr - pl)
                            } else {
                                0.5 * (l + r.max(l))
                            }
                        }
                        (Some(l), None) => l,
                        (None, Some(r)) => r,
                        (None, None) => 0.0,
                    }
                })
                .collect();
            let plateaus = gaps.into_iter().filter(|(a, b)| b - a > opts.plateau_min).collect();
            return Ok(CoordinateFunction {
                grid: grid.to_vec(),
                values,
                plateaus,
                level,
                denominator: den,
                orbit_points: inside.len(),
                max_gap,
            });
        }
        level += 1;
        den = next_den;
    }
}
