//! Denjoy-type circle actions.
//!
//! The generator `a` is a Denjoy homeomorphism with rotation number `α`: the
//! rotation orbit `θ_n = nα mod 1` (`|n| ≤ N`) is blown up into gaps `I_n` of
//! length `ℓ_n`, and `a` maps `I_n` affinely onto `I_{n+1}`. The translation
//! subgroup acts only inside the gaps, on `I_n` by `a^n ∘ φ(A^{-n} v) ∘ a^{-n}`,
//! where `φ(w)` is the bump flow with time `⟨s, w⟩` in the gap coordinate.
//!
//! Angles are stored as `u64` fractions of a turn so that the rotation
//! `θ ↦ θ + α` is exact and order-preserving on the stored orbit.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::rotation::{rotation_number_estimate, RotationEstimate};
use super::ConstructionError;
use crate::dynamics1d::flows::bump_flow;
use crate::dynamics1d::{relation_residuals, Domain, DynamicsError, GroupAction, IntervalMap, RelationResiduals};
use crate::exactmath::rational::to_f64;
use crate::exactmath::RationalMatrix;
use crate::groupcore::{GroupContext, GroupElement};

fn default_rotation() -> f64 {
    (5f64.sqrt() - 1.0) / 2.0
}

fn default_budget() -> f64 {
    0.5
}

fn default_count() -> usize {
    400
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DenjoySpec {
    #[serde(default = "default_rotation")]
    pub rotation: f64,
    /// Total gap length `L`; the Cantor set keeps measure `1 - L`.
    #[serde(default = "default_budget")]
    pub gap_budget: f64,
    /// Gaps with `|n| ≤ gap_count` get `ℓ_n ∝ 1/(n²+1)`.
    #[serde(default = "default_count")]
    pub gap_count: usize,
    /// Linear form feeding the gap flows; all ones when absent.
    #[serde(default)]
    pub s: Option<Vec<f64>>,
}

impl Default for DenjoySpec {
    fn default() -> Self {
        DenjoySpec { rotation: default_rotation(), gap_budget: default_budget(), gap_count: default_count(), s: None }
    }
}

/// Extra gaps past `gap_count` whose lengths halve each step, so the last
/// ones sit far below binary64 resolution.
const TAIL: usize = 64;
const TWO64: f64 = 18_446_744_073_709_551_616.0;

#[derive(Clone, Debug)]
pub struct DenjoyAction {
    ctx: GroupContext,
    spec: DenjoySpec,
    s: Vec<f64>,
    alpha: f64,
    step: u64,
    n_max: i64,
    /// Per sorted position.
    theta: Vec<u64>,
    left: Vec<f64>,
    len: Vec<f64>,
    index: Vec<i64>,
    /// Prefix sums of `len` in sorted order; `prefix[i]` sums the first `i`.
    prefix: Vec<f64>,
    /// Sorted position of gap `n`, at `n + n_max`.
    position: Vec<usize>,
    /// `(Aᵀ)^{-n} s` at `n + n_max`.
    w: Vec<Vec<f64>>,
}

enum Loc {
    Gap { pos: usize, u: f64 },
    Point(u64),
}

pub fn denjoy_circle_build(a: &RationalMatrix, spec: &DenjoySpec) -> Result<DenjoyAction, ConstructionError> {
    let ctx = GroupContext::new(a.clone())?;
    let d = ctx.dim();
    if !spec.rotation.is_finite() {
        return Err(ConstructionError::Precondition("rotation target must be finite".into()));
    }
    let alpha = spec.rotation.rem_euclid(1.0);
    if let Some(q) = (1..=100).find(|&q| {
        let x = q as f64 * alpha;
        (x - x.round()).abs() < 1e-9
    }) {
        return Err(ConstructionError::Precondition(format!(
            "rotation target {} is rational with denominator {q} (finite orbits, no Denjoy regime)",
            spec.rotation
        )));
    }
    let big_l = spec.gap_budget;
    if !big_l.is_finite() || big_l >= 1.0 {
        return Err(ConstructionError::Geometry(format!("gap budget {big_l} leaves no room for the minimal set")));
    }
    if big_l <= 0.0 {
        return Err(ConstructionError::Geometry("gap budget must be positive".into()));
    }
    if spec.gap_count == 0 {
        return Err(ConstructionError::Precondition("gap_count must be positive".into()));
    }
    let s = spec.s.clone().unwrap_or_else(|| vec![1.0; d]);
    if s.len() != d || s.iter().any(|x| !x.is_finite()) {
        return Err(ConstructionError::Precondition(format!("s must have {d} finite coordinates")));
    }

    let n0 = spec.gap_count as i64;
    let n_max = n0 + TAIL as i64;
    let step = (alpha * TWO64) as u64;
    let raw: Vec<f64> = (-n_max..=n_max)
        .map(|n| {
            let base = 1.0 / ((n * n) as f64 + 1.0);
            let extra = n.abs() - n0;
            if extra > 0 {
                base * 0.5f64.powi(extra as i32)
            } else {
                base
            }
        })
        .collect();
    let scale = big_l / raw.iter().sum::<f64>();
    let mut gaps: Vec<(u64, f64, i64)> = (-n_max..=n_max)
        .map(|n| ((n as u64).wrapping_mul(step), raw[(n + n_max) as usize] * scale, n))
        .collect();
    gaps.sort_by_key(|g| g.0);
    if gaps.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(ConstructionError::Precondition("rotation orbit has repeated points".into()));
    }
    let mut prefix = Vec::with_capacity(gaps.len() + 1);
    prefix.push(0.0);
    for g in &gaps {
        prefix.push(prefix.last().unwrap() + g.1);
    }
    let left: Vec<f64> = gaps.iter().enumerate().map(|(i, g)| (1.0 - big_l) * (g.0 as f64 / TWO64) + prefix[i]).collect();
    let mut position = vec![0; gaps.len()];
    for (i, g) in gaps.iter().enumerate() {
        position[(g.2 + n_max) as usize] = i;
    }

    let at: DMatrix<f64> = a.transpose().to_f64();
    let at_inv: DMatrix<f64> = a.transpose().inverse()?.to_f64();
    let mut w = vec![Vec::new(); gaps.len()];
    let s0 = DVector::from_column_slice(&s);
    w[n_max as usize] = s.clone();
    let (mut up, mut down) = (s0.clone(), s0);
    for n in 1..=n_max {
        up = &at_inv * up;
        down = &at * down;
        w[(n + n_max) as usize] = up.iter().copied().collect();
        w[(n_max - n) as usize] = down.iter().copied().collect();
    }
    if w.iter().flatten().any(|x| !x.is_finite()) {
        return Err(ConstructionError::Precondition("gap flow times overflow; reduce gap_count".into()));
    }

    Ok(DenjoyAction {
        ctx,
        spec: spec.clone(),
        s,
        alpha,
        step,
        n_max,
        theta: gaps.iter().map(|g| g.0).collect(),
        len: gaps.iter().map(|g| g.1).collect(),
        index: gaps.iter().map(|g| g.2).collect(),
        left,
        prefix,
        position,
        w,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PeriodicCheck {
    pub max_period: u32,
    pub grid: usize,
    /// Smallest distance from `a^k(x) - x` to an integer over the grid.
    pub min_distance_to_integer: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DenjoyAudit {
    pub rotation_target: f64,
    pub gap_budget: f64,
    pub gaps: usize,
    pub s: Vec<f64>,
    pub rotation_a: RotationEstimate,
    pub rotation_target_error: f64,
    pub rotation_b: Vec<RotationEstimate>,
    pub periodic: PeriodicCheck,
    pub relations: RelationResiduals,
    pub lift_error: f64,
}

impl DenjoyAction {
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn s(&self) -> &[f64] {
        &self.s
    }

    pub fn gap_count(&self) -> usize {
        self.theta.len()
    }

    /// `(left, length)` of gap `I_n`.
    pub fn gap(&self, n: i64) -> Option<(f64, f64)> {
        (n.abs() <= self.n_max).then(|| {
            let p = self.position[(n + self.n_max) as usize];
            (self.left[p], self.len[p])
        })
    }

    fn locate(&self, x: f64) -> Loc {
        let i = self.left.partition_point(|&l| l <= x);
        if i > 0 {
            let p = i - 1;
            if x < self.left[p] + self.len[p] {
                return Loc::Gap { pos: p, u: ((x - self.left[p]) / self.len[p]).clamp(0.0, 1.0) };
            }
        }
        let (base_theta, base_x) = if i > 0 { (self.theta[i - 1], self.left[i - 1] + self.len[i - 1]) } else { (0, 0.0) };
        let off = ((x - base_x) / (1.0 - self.spec.gap_budget) * TWO64).max(0.0) as u64;
        let mut t = base_theta.saturating_add(off);
        let lo = if i > 0 { base_theta.saturating_add(1) } else { 0 };
        let hi = self.theta.get(i).map_or(u64::MAX, |&th| th.saturating_sub(1));
        t = t.clamp(lo, hi.max(lo));
        Loc::Point(t)
    }

    /// Position in `[0,1)` of the angle `θ` (left limit at gap angles).
    fn place(&self, theta: u64) -> f64 {
        let c = self.theta.partition_point(|&t| t < theta);
        (1.0 - self.spec.gap_budget) * (theta as f64 / TWO64) + self.prefix[c]
    }

    /// Lift of `a^{±1}` on `[0,1)`, values in `[-1, 2)`.
    fn step_unit(&self, x: f64, forward: bool) -> f64 {
        let wraps = |th: u64| -> (u64, f64) {
            if forward {
                let (t, o) = th.overflowing_add(self.step);
                (t, if o { 1.0 } else { 0.0 })
            } else {
                let (t, o) = th.overflowing_sub(self.step);
                (t, if o { -1.0 } else { 0.0 })
            }
        };
        match self.locate(x) {
            Loc::Gap { pos, u } => {
                let n = self.index[pos];
                let target = if forward { n + 1 } else { n - 1 };
                let (th, wrap) = wraps(self.theta[pos]);
                if target.abs() <= self.n_max {
                    let q = self.position[(target + self.n_max) as usize];
                    self.left[q] + u * self.len[q] + wrap
                } else {
                    self.place(th) + wrap
                }
            }
            Loc::Point(t) => {
                let (th, wrap) = wraps(t);
                self.place(th) + wrap
            }
        }
    }

    /// `a^k` on the lift.
    pub fn a_power(&self, k: i64, x: f64) -> f64 {
        let m = x.floor();
        let mut turns = m;
        let mut y = x - m;
        for _ in 0..k.unsigned_abs() {
            let z = self.step_unit(y, k > 0);
            let f = z.floor();
            turns += f;
            y = z - f;
        }
        turns + y
    }

    /// `b^v` on the lift.
    pub fn b(&self, v: &[f64], x: f64) -> f64 {
        let m = x.floor();
        let y = x - m;
        match self.locate(y) {
            Loc::Gap { pos, u } => {
                let n = self.index[pos];
                let c: f64 = self.w[(n + self.n_max) as usize].iter().zip(v).map(|(a, b)| a * b).sum();
                if c == 0.0 {
                    return x;
                }
                m + self.left[pos] + self.len[pos] * bump_flow(c, u)
            }
            Loc::Point(_) => x,
        }
    }

    /// `per_gap` points inside each gap `I_n`, `|n| ≤ max_n`.
    pub fn gap_samples(&self, max_n: i64, per_gap: usize) -> Vec<f64> {
        let mut out = Vec::new();
        for n in -max_n..=max_n {
            if let Some((l, len)) = self.gap(n) {
                out.extend((0..per_gap).map(|i| l + len * (i as f64 + 0.5) / per_gap as f64));
            }
        }
        out
    }

    /// Checks that `a^k(x) - x` stays inside one open interval `(m, m+1)`
    /// over the grid for each `k ≤ max_period`.
    pub fn periodic_check(&self, max_period: u32, grid: usize) -> PeriodicCheck {
        let xs: Vec<f64> = (0..grid).map(|i| i as f64 / grid as f64).collect();
        let mut min_dist = f64::INFINITY;
        let mut pass = true;
        let mut ys = xs.clone();
        for _ in 1..=max_period {
            ys = ys.iter().map(|&y| self.a_power(1, y)).collect();
            let disp: Vec<f64> = ys.iter().zip(&xs).map(|(y, x)| y - x).collect();
            let floor0 = disp[0].floor();
            for &dv in &disp {
                let dist = (dv - dv.round()).abs();
                min_dist = min_dist.min(dist);
                if dv.floor() != floor0 || dist == 0.0 {
                    pass = false;
                }
            }
        }
        PeriodicCheck { max_period, grid, min_distance_to_integer: min_dist, pass }
    }

    pub fn audit(&self, iterates: u64) -> Result<DenjoyAudit, ConstructionError> {
        let a = self.element(&self.ctx.a())?;
        let rotation_a = rotation_number_estimate(&a, iterates)?;
        let rotation_b = (0..self.ctx.dim())
            .map(|i| rotation_number_estimate(&self.element(&self.ctx.b_i(i))?, iterates))
            .collect::<Result<Vec<_>, _>>()?;
        let relations = relation_residuals(self, &self.gap_samples(20, 25))?;
        Ok(DenjoyAudit {
            rotation_target: self.spec.rotation,
            gap_budget: self.spec.gap_budget,
            gaps: self.gap_count(),
            s: self.s.clone(),
            rotation_target_error: (rotation_a.value - self.alpha).abs(),
            rotation_a,
            rotation_b,
            periodic: self.periodic_check(20, 1000),
            relations,
            lift_error: a.check(1000).lift_error.unwrap_or(f64::NAN),
        })
    }
}

impl GroupAction for DenjoyAction {
    fn context(&self) -> &GroupContext {
        &self.ctx
    }

    fn domain(&self) -> Domain {
        Domain::CircleLift
    }

    fn element(&self, g: &GroupElement) -> Result<IntervalMap, DynamicsError> {
        if g.v.len() != self.ctx.dim() {
            return Err(DynamicsError::InvalidElement(format!("expected {} coordinates, got {}", self.ctx.dim(), g.v.len())));
        }
        let v: Vec<f64> = g.v.iter().map(to_f64).collect();
        let neg: Vec<f64> = v.iter().map(|x| -x).collect();
        let k = g.k;
        let (a, b) = (self.clone(), self.clone());
        Ok(IntervalMap::new(Domain::CircleLift, self.name(), move |x| a.a_power(k, a.b(&v, x)))
            .with_inverse(move |y| b.b(&neg, b.a_power(-k, y))))
    }

    fn name(&self) -> String {
        "denjoy".into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs12() -> RationalMatrix {
        RationalMatrix::from_i64(&[&[2]])
    }

    #[test]
    fn gaps_tile_the_circle() {
        let act = denjoy_circle_build(&bs12(), &DenjoySpec::default()).unwrap();
        let total: f64 = act.len.iter().sum();
        assert!((total - 0.5).abs() < 1e-12);
        assert!(act.left.windows(2).zip(&act.len).all(|(w, l)| w[0] + l <= w[1] + 1e-15));
        assert_eq!(act.gap(0).unwrap().0, 0.0);
    }

    #[test]
    fn gaps_map_to_next_gap() {
        let act = denjoy_circle_build(&bs12(), &DenjoySpec::default()).unwrap();
        for n in -30..30 {
            let (l, len) = act.gap(n).unwrap();
            let (l1, len1) = act.gap(n + 1).unwrap();
            let x = l + 0.3 * len;
            let y = act.a_power(1, x);
            let y = y - y.floor();
            assert!((y - (l1 + 0.3 * len1)).abs() < 1e-15);
            assert!((act.a_power(-1, act.a_power(1, x)) - x).abs() < 1e-15);
        }
    }

    #[test]
    fn plain_denjoy_rotation_number() {
        let spec = DenjoySpec { s: Some(vec![0.0]), ..DenjoySpec::default() };
        let act = denjoy_circle_build(&bs12(), &spec).unwrap();
        let a = act.element(&act.context().a()).unwrap();
        let r = rotation_number_estimate(&a, 100_000).unwrap();
        assert!((r.value - spec.rotation).abs() < 1e-4, "{r:?}");
        let b = act.element(&act.context().b_i(0)).unwrap();
        for i in 0..100 {
            let x = i as f64 / 100.0;
            assert_eq!(b.eval(x), x);
        }
    }

    #[test]
    fn full_construction_audit() {
        let act = denjoy_circle_build(&bs12(), &DenjoySpec::default()).unwrap();
        let audit = act.audit(100_000).unwrap();
        assert!(audit.rotation_target_error < 1e-4);
        assert!(audit.periodic.pass);
        assert!(audit.rotation_b.iter().all(|r| r.value == 0.0));
        assert!(audit.relations.max < 1e-8, "{:?}", audit.relations);
        assert!(audit.lift_error < 1e-10);
    }

    #[test]
    fn b_moves_gap_points_only() {
        let act = denjoy_circle_build(&bs12(), &DenjoySpec::default()).unwrap();
        let (l, len) = act.gap(3).unwrap();
        let x = l + 0.5 * len;
        assert!(act.b(&[1.0], x) != x);
        let y = l + len + 1e-9;
        assert_eq!(act.b(&[1.0], y), y);
    }

    #[test]
    fn rejected_specs() {
        let zero = DenjoySpec { rotation: 0.0, ..DenjoySpec::default() };
        assert!(matches!(denjoy_circle_build(&bs12(), &zero), Err(ConstructionError::Precondition(_))));
        let half = DenjoySpec { rotation: 0.5, ..DenjoySpec::default() };
        assert!(matches!(denjoy_circle_build(&bs12(), &half), Err(ConstructionError::Precondition(_))));
        let big = DenjoySpec { gap_budget: 1.2, ..DenjoySpec::default() };
        assert!(matches!(denjoy_circle_build(&bs12(), &big), Err(ConstructionError::Geometry(_))));
    }
}
