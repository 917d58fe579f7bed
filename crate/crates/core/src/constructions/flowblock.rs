//! Flow-block actions on `[0,1]`.
//!
//! Blocks are `I_k = (σ(k), σ(k+1))` with `σ(k) = 1/(1 + r^{-k})`, so in the
//! coordinate `τ = log_r(x/(1-x))` the block `I_k` is `(k, k+1)` and
//! `a ↦ f` is translation by one. On `I_{-k}` the element `b^t` acts as
//! `f^{-k} ∘ ξ^{c_k(t)} ∘ f^k` where `ξ` is the bump flow in the block
//! coordinate and `c_k(t) = ⟨s, A^k t⟩ = ⟨(Aᵀ)^k s, t⟩`.

use std::io::{self, Write};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::ConstructionError;
use crate::dynamics1d::flows::{bump_flow, bump_flow_derivative};
use crate::dynamics1d::{Domain, DynamicsError, GroupAction, IntervalMap};
use crate::exactmath::rational::to_f64;
use crate::exactmath::{Rational, RationalMatrix};
use crate::groupcore::{GroupContext, GroupElement};
use crate::spectral::{classify, splitting, SpectralSplit};

/// Which linear form `⟨s, ·⟩` feeds the block multipliers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SChoice {
    /// Orthogonal projection of `t0` onto `E^c_*`.
    CentralStar,
    /// Unit vector spanning (the first direction of) `E^u`.
    Unstable,
    Vector { values: Vec<f64> },
}

fn default_ratio() -> f64 {
    2.0
}

fn default_range() -> i64 {
    40
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowBlockSpec {
    pub s: SChoice,
    /// Translation vector used for the multiplier profile and the probe.
    #[serde(with = "crate::exactmath::rational::serde_rational::vec")]
    pub t0: Vec<Rational>,
    /// Block ratio `r`; `f` multiplies `x/(1-x)` by `r`.
    #[serde(default = "default_ratio")]
    pub ratio: f64,
    /// Profile range `K`: multipliers for `|k| ≤ K`.
    #[serde(default = "default_range")]
    pub range: i64,
}

const CACHE: i64 = 64;

#[derive(Clone, Debug)]
pub struct FlowBlockAction {
    ctx: GroupContext,
    spec: FlowBlockSpec,
    s: DVector<f64>,
    keep: [bool; 3],
    split: Option<SpectralSplit>,
    at: DMatrix<f64>,
    at_inv: DMatrix<f64>,
    /// `(Aᵀ)^k s` for `|k| ≤ CACHE`, index `k + CACHE`.
    cache: Vec<DVector<f64>>,
    irreducible: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MultiplierProfile {
    pub t0: Vec<f64>,
    pub entries: Vec<(i64, f64)>,
    pub c0: f64,
    pub sup: f64,
    pub inf: f64,
    /// `sup |c_k| / |c_0|`.
    pub sup_over_c0: f64,
    /// `sup |c_k| / inf |c_k|`.
    pub sup_over_inf: f64,
}

impl MultiplierProfile {
    /// CSV with columns `k, c_k`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "k,c_k")?;
        for (k, c) in &self.entries {
            writeln!(w, "{k},{c}")?;
        }
        Ok(())
    }
}

pub fn flowblock_build(a: &RationalMatrix, spec: &FlowBlockSpec) -> Result<FlowBlockAction, ConstructionError> {
    let ctx = GroupContext::new(a.clone())?;
    let d = ctx.dim();
    if !(spec.ratio.is_finite() && spec.ratio > 1.0) {
        return Err(ConstructionError::Geometry(format!("block ratio {} gives zero-length blocks", spec.ratio)));
    }
    if spec.t0.len() != d {
        return Err(ConstructionError::Precondition(format!("t0 has {} coordinates, expected {d}", spec.t0.len())));
    }
    if spec.range < 0 {
        return Err(ConstructionError::Precondition("profile range must be non-negative".into()));
    }
    let at = a.transpose().to_f64();
    let at_inv = a.transpose().inverse()?.to_f64();
    let split = splitting(a).ok();
    let t0 = DVector::from_iterator(d, spec.t0.iter().map(to_f64));
    let need_split = || {
        split.clone().ok_or_else(|| ConstructionError::Precondition("spectral splitting unavailable for this matrix".into()))
    };
    let (s, keep) = match &spec.s {
        SChoice::CentralStar => {
            let sp = need_split()?;
            let q = &sp.central_star;
            if q.ncols() == 0 {
                return Err(ConstructionError::Precondition("E^c_* is trivial (A is hyperbolic)".into()));
            }
            (q * (q.transpose() * &t0), [false, false, true])
        }
        SChoice::Unstable => {
            let sp = need_split()?;
            if sp.unstable.ncols() == 0 {
                return Err(ConstructionError::Precondition("E^u is trivial".into()));
            }
            (sp.unstable.column(0).into_owned(), [false, true, false])
        }
        SChoice::Vector { values } => {
            if values.len() != d || values.iter().any(|v| !v.is_finite()) {
                return Err(ConstructionError::Precondition(format!("s must have {d} finite coordinates")));
            }
            (DVector::from_column_slice(values), [true; 3])
        }
    };
    let irreducible = classify(a)?.irreducible_over_q;
    let mut act = FlowBlockAction { ctx, spec: spec.clone(), s, keep, split, at, at_inv, cache: Vec::new(), irreducible };
    act.cache = (-CACHE..=CACHE).map(|k| act.compute_w(k)).collect();
    Ok(act)
}

impl FlowBlockAction {
    pub fn s(&self) -> &DVector<f64> {
        &self.s
    }

    pub fn spec(&self) -> &FlowBlockSpec {
        &self.spec
    }

    pub fn irreducible(&self) -> bool {
        self.irreducible
    }

    pub fn ratio(&self) -> f64 {
        self.spec.ratio
    }

    fn compute_w(&self, k: i64) -> DVector<f64> {
        match &self.split {
            Some(sp) => sp.evolve_parts(&self.s, k, self.keep),
            None => {
                let m = if k >= 0 { &self.at } else { &self.at_inv };
                (0..k.unsigned_abs()).fold(self.s.clone(), |w, _| m * w)
            }
        }
    }

    /// `(Aᵀ)^k s`.
    pub fn w(&self, k: i64) -> DVector<f64> {
        if k.abs() <= CACHE {
            self.cache[(k + CACHE) as usize].clone()
        } else {
            self.compute_w(k)
        }
    }

    /// `c_k(t) = ⟨(Aᵀ)^k s, t⟩`.
    pub fn multiplier(&self, k: i64, t: &[f64]) -> f64 {
        self.w(k).iter().zip(t).map(|(a, b)| a * b).sum()
    }

    /// Left endpoint `σ(k)` of `I_k`.
    pub fn sigma(&self, k: i64) -> f64 {
        1.0 / (1.0 + self.spec.ratio.powi(-k as i32))
    }

    /// Block index `j` and coordinate `u ∈ [0,1)` with `x ∈ I_j`.
    pub fn block_coordinate(&self, x: f64) -> (i64, f64) {
        let r = self.spec.ratio;
        let z = x / (1.0 - x);
        let j = (z.ln() / r.ln()).floor();
        let mut j = j as i64;
        let mut u = (z / r.powi(j as i32)).ln() / r.ln();
        if u < 0.0 {
            j -= 1;
            u += 1.0;
        } else if u >= 1.0 {
            j += 1;
            u -= 1.0;
        }
        (j, u.clamp(0.0, 1.0))
    }

    fn from_block(&self, j: i64, u: f64) -> f64 {
        let r = self.spec.ratio;
        let z = r.powi(j as i32) * r.powf(u);
        1.0 / (1.0 + 1.0 / z)
    }

    /// `f^k(x)`.
    pub fn f_power(&self, k: i64, x: f64) -> f64 {
        if k == 0 || x <= 0.0 || x >= 1.0 {
            return x;
        }
        let rk = self.spec.ratio.powi(k as i32);
        1.0 / (1.0 + (1.0 - x) / (x * rk))
    }

    fn f_power_derivative(&self, k: i64, x: f64) -> f64 {
        let rk = self.spec.ratio.powi(k as i32);
        let den = 1.0 + (rk - 1.0) * x;
        rk / (den * den)
    }

    /// `g_t(x)` for `t ∈ R^d`.
    pub fn g(&self, t: &[f64], x: f64) -> f64 {
        if x <= 0.0 || x >= 1.0 {
            return x;
        }
        let (j, u) = self.block_coordinate(x);
        let c = self.multiplier(-j, t);
        if c == 0.0 {
            return x;
        }
        self.from_block(j, bump_flow(c, u))
    }

    fn g_derivative(&self, t: &[f64], x: f64) -> f64 {
        if x <= 0.0 || x >= 1.0 {
            return 1.0;
        }
        let (j, u) = self.block_coordinate(x);
        let c = self.multiplier(-j, t);
        if c == 0.0 {
            return 1.0;
        }
        let y = self.from_block(j, bump_flow(c, u));
        (y * (1.0 - y)) / (x * (1.0 - x)) * bump_flow_derivative(c, u)
    }

    /// `max |f(σ(k)) - σ(k+1)|` for `|k| ≤ range`.
    pub fn endpoint_residual(&self, range: i64) -> f64 {
        (-range..=range).map(|k| (self.f_power(1, self.sigma(k)) - self.sigma(k + 1)).abs()).fold(0.0, f64::max)
    }

    /// Largest gap between `g_t` and `f^{-k} ∘ ξ^{c_k} ∘ f^k` over `samples`
    /// points of each block `I_{-k}`, `|k| ≤ range`.
    pub fn extension_residual(&self, t: &[f64], range: i64, samples: usize) -> f64 {
        let mut worst: f64 = 0.0;
        for k in -range..=range {
            let c = self.multiplier(k, t);
            let (lo, hi) = (self.sigma(-k), self.sigma(-k + 1));
            for i in 0..samples {
                let x = lo + (hi - lo) * (i as f64 + 0.5) / samples as f64;
                let y = self.f_power(k, x);
                let r = self.spec.ratio;
                let u = (y / (1.0 - y)).ln() / r.ln();
                let moved = 1.0 / (1.0 + r.powf(-bump_flow(c, u.clamp(0.0, 1.0))));
                let direct = self.f_power(-k, moved);
                worst = worst.max((direct - self.g(t, x)).abs());
            }
        }
        worst
    }

    pub fn multiplier_profile(&self, t0: &[f64]) -> MultiplierProfile {
        let range = self.spec.range;
        let entries: Vec<(i64, f64)> = (-range..=range).map(|k| (k, self.multiplier(k, t0))).collect();
        let c0 = self.multiplier(0, t0);
        let sup = entries.iter().map(|e| e.1.abs()).fold(0.0, f64::max);
        let inf = entries.iter().map(|e| e.1.abs()).fold(f64::INFINITY, f64::min);
        MultiplierProfile { t0: t0.to_vec(), entries, c0, sup, inf, sup_over_c0: sup / c0.abs(), sup_over_inf: sup / inf }
    }

    pub fn t0_f64(&self) -> Vec<f64> {
        self.spec.t0.iter().map(to_f64).collect()
    }
}

impl GroupAction for FlowBlockAction {
    fn context(&self) -> &GroupContext {
        &self.ctx
    }

    fn domain(&self) -> Domain {
        Domain::Unit
    }

    fn element(&self, g: &GroupElement) -> Result<IntervalMap, DynamicsError> {
        if g.v.len() != self.ctx.dim() {
            return Err(DynamicsError::InvalidElement(format!("expected {} coordinates, got {}", self.ctx.dim(), g.v.len())));
        }
        let t: Vec<f64> = g.v.iter().map(to_f64).collect();
        let neg: Vec<f64> = t.iter().map(|x| -x).collect();
        let k = g.k;
        let (a, b, c) = (self.clone(), self.clone(), self.clone());
        let t2 = t.clone();
        Ok(IntervalMap::new(Domain::Unit, self.name(), move |x| a.f_power(k, a.g(&t, x)))
            .with_inverse(move |y| b.g(&neg, b.f_power(-k, y)))
            .with_derivative(move |x| {
                if x <= 0.0 || x >= 1.0 {
                    // Only the f^k factor; smoothness of g at the ends is not certified.
                    return c.f_power_derivative(k, x);
                }
                c.f_power_derivative(k, c.g(&t2, x)) * c.g_derivative(&t2, x)
            }))
    }

    fn name(&self) -> String {
        "flowblock".into()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProbeStatus {
    /// A point moved by `g_{t0}` was found.
    Faithful,
    /// `t0 = 0`: `g_{t0}` is the identity.
    NotApplicable,
    /// Every sampled `c_k` vanishes and `A` is reducible.
    NoWitness,
    /// Every sampled `c_k` vanishes although `A` is irreducible and `s ≠ 0`.
    Inconsistent,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeVerdict {
    pub status: ProbeStatus,
    pub irreducible: bool,
    pub witness_k: Option<i64>,
    pub c_k: Option<f64>,
    pub moved_point: Option<f64>,
    pub displacement: Option<f64>,
    pub threshold: f64,
    pub scanned: i64,
}

const PROBE_THRESHOLD: f64 = 1e-9;

/// Looks for `k` with `|c_k(t0)| > 1e-9` and a point of `I_{-k}` moved by
/// more than `1e-9`, scanning `k` by increasing `|k|` up to 40.
pub fn faithfulness_probe(action: &FlowBlockAction, t0: &[Rational]) -> Result<ProbeVerdict, ConstructionError> {
    if action.s.iter().all(|&x| x == 0.0) {
        return Err(ConstructionError::Precondition("s = 0".into()));
    }
    let scanned = 40;
    let mut v = ProbeVerdict {
        status: ProbeStatus::NotApplicable,
        irreducible: action.irreducible,
        witness_k: None,
        c_k: None,
        moved_point: None,
        displacement: None,
        threshold: PROBE_THRESHOLD,
        scanned,
    };
    if t0.iter().all(|x| x == &Rational::from_integer(0.into())) {
        return Ok(v);
    }
    let t: Vec<f64> = t0.iter().map(to_f64).collect();
    let order = (0..=scanned).flat_map(|m| if m == 0 { vec![0] } else { vec![m, -m] });
    for k in order {
        let c = action.multiplier(k, &t);
        if c.abs() <= PROBE_THRESHOLD {
            continue;
        }
        let (lo, hi) = (action.sigma(-k), action.sigma(-k + 1));
        let best = (0..200)
            .map(|i| lo + (hi - lo) * (i as f64 + 0.5) / 200.0)
            .map(|x| (x, (action.g(&t, x) - x).abs()))
            .fold((0.0, 0.0), |b, p| if p.1 > b.1 { p } else { b });
        if best.1 > PROBE_THRESHOLD {
            v.status = ProbeStatus::Faithful;
            v.witness_k = Some(k);
            v.c_k = Some(c);
            v.moved_point = Some(best.0);
            v.displacement = Some(best.1);
            return Ok(v);
        }
    }
    v.status = if action.irreducible { ProbeStatus::Inconsistent } else { ProbeStatus::NoWitness };
    Ok(v)
}
