//! Scenario execution: stages run in order, each adding results and verdicts
//! to a single report.

pub mod report;
pub mod scenario;

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

pub use report::{ExitStatus, Provenance, Report, StageError, StageRecord, StageStatus, Verdict};
pub use scenario::{Construction, InputError, MatrixRows, Scenario, Stage};

use crate::affinerep::{homomorphism_check, synthesize, AffineRepresentation, RepError};
use crate::constructions::flowblock::ProbeStatus;
use crate::constructions::gs::GsAction;
use crate::constructions::{
    denjoy_circle_build, faithfulness_probe, flowblock_build, gs_build, rotation_vector_group, BaseRecipe, ConstructionError,
    FlowBlockAction, SChoice,
};
use crate::dynamics1d::conjugacy::{conjugacy_extract, ExtractOptions};
use crate::dynamics1d::{
    chart_conjugate, composition_harness, displacement_track, flow_root_check, homomorphism_residual, interior_grid,
    multiplier_audit, relation_residuals, DynamicsError, GroupAction,
};
use crate::exactmath::{ratio, RationalMatrix};
use crate::groupcore::GroupElement;
use crate::spectral::{classify, splitting, SpectralClassification, SpectralError, SpectralSplit};

/// Files produced next to the report (name, contents).
pub type Artifacts = Vec<(String, String)>;

#[derive(Clone, Debug)]
pub struct Outcome {
    pub report: Report,
    pub artifacts: Artifacts,
}

struct StageFailure {
    kind: String,
    message: String,
}

impl From<SpectralError> for StageFailure {
    fn from(e: SpectralError) -> Self {
        let kind = match &e {
            SpectralError::Singular => "Singular",
            SpectralError::NotSquare => "NotSquare",
            SpectralError::DefectiveUnitBlock(_) => "DefectiveUnitBlock",
            SpectralError::Numerical(_) => "Numerical",
            SpectralError::Exact(_) => "Exact",
        };
        StageFailure { kind: kind.into(), message: e.to_string() }
    }
}

impl From<RepError> for StageFailure {
    fn from(e: RepError) -> Self {
        let kind = match &e {
            RepError::NoPositiveRealEigenvalue => "NoPositiveRealEigenvalue",
            RepError::DegenerateEigenvalue => "DegenerateEigenvalue",
            RepError::EigenEquation => "EigenEquation",
            RepError::Spectral(_) => "Spectral",
            RepError::Group(_) => "Group",
            RepError::Exact(_) => "Exact",
        };
        StageFailure { kind: kind.into(), message: e.to_string() }
    }
}

impl From<DynamicsError> for StageFailure {
    fn from(e: DynamicsError) -> Self {
        let kind = match &e {
            DynamicsError::NoInteriorFixedPoint => "NoInteriorFixedPoint",
            DynamicsError::Precondition(_) => "Precondition",
            DynamicsError::DegenerateDisplacement(_) => "DegenerateDisplacement",
            DynamicsError::Unsupported(_) => "Unsupported",
            DynamicsError::InvalidElement(_) => "InvalidElement",
            DynamicsError::Rep(_) => "Representation",
            DynamicsError::Spectral(_) => "Spectral",
        };
        StageFailure { kind: kind.into(), message: e.to_string() }
    }
}

impl From<ConstructionError> for StageFailure {
    fn from(e: ConstructionError) -> Self {
        let kind = match &e {
            ConstructionError::Precondition(_) => "Precondition",
            ConstructionError::Geometry(_) => "Geometry",
            ConstructionError::InfiniteFamily => "InfiniteFamily",
            ConstructionError::Inconsistent(_) => "Inconsistent",
            ConstructionError::Dynamics(_) => "Dynamics",
            ConstructionError::Spectral(_) => "Spectral",
            ConstructionError::Group(_) => "Group",
            ConstructionError::Exact(_) => "Exact",
        };
        StageFailure { kind: kind.into(), message: e.to_string() }
    }
}

fn fail(kind: &str, message: impl Into<String>) -> StageFailure {
    StageFailure { kind: kind.into(), message: message.into() }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("stage result serializes")
}

struct Run<'a> {
    sc: &'a Scenario,
    a: RationalMatrix,
    seed: u64,
    class: Option<SpectralClassification>,
    split: Option<SpectralSplit>,
    rep: Option<AffineRepresentation>,
    verdicts: Vec<Verdict>,
    artifacts: Artifacts,
}

/// Runs every stage of `sc`. `bytes` are hashed into the provenance.
pub fn execute(sc: &Scenario, bytes: &[u8], seed_override: Option<u64>) -> Outcome {
    let seed = seed_override.unwrap_or(sc.seed);
    let mut run = Run {
        sc,
        a: sc.matrix(),
        seed,
        class: None,
        split: None,
        rep: None,
        verdicts: Vec::new(),
        artifacts: Vec::new(),
    };
    let mut stages = Vec::new();
    let mut failed = false;
    for &st in &sc.pipeline {
        if failed {
            stages.push(StageRecord { stage: st, status: StageStatus::Skipped, result: Value::Null, error: None });
            continue;
        }
        match run.stage(st) {
            Ok(result) => stages.push(StageRecord { stage: st, status: StageStatus::Ok, result, error: None }),
            Err(e) => {
                failed = true;
                stages.push(StageRecord {
                    stage: st,
                    status: StageStatus::PreconditionFailed,
                    result: Value::Null,
                    error: Some(StageError { kind: e.kind, message: e.message }),
                });
            }
        }
    }
    let all_pass = run.verdicts.iter().all(|v| v.pass);
    let exit_status = if failed {
        ExitStatus::PreconditionFailure
    } else if !all_pass {
        ExitStatus::VerdictFailure
    } else {
        ExitStatus::Pass
    };
    let report = Report {
        provenance: Provenance::new(&sc.name, bytes, seed),
        stages,
        verdicts: run.verdicts,
        pass: exit_status == ExitStatus::Pass,
        exit_status,
        exit_code: exit_status.code(),
    };
    Outcome { report, artifacts: run.artifacts }
}

/// Like [`execute`] with the pipeline replaced by `stages`.
pub fn execute_stages(sc: &Scenario, bytes: &[u8], stages: &[Stage], seed_override: Option<u64>) -> Result<Outcome, InputError> {
    let mut sc = sc.clone();
    sc.pipeline = stages.to_vec();
    sc.validate()?;
    Ok(execute(&sc, bytes, seed_override))
}

impl Run<'_> {
    fn stage(&mut self, st: Stage) -> Result<Value, StageFailure> {
        match st {
            Stage::Classify => self.classify(),
            Stage::Splitting => self.splitting(),
            Stage::Represent => self.represent(),
            Stage::Homomorphism => self.homomorphism(),
            Stage::MultiplierAudit => self.multiplier(),
            Stage::Displacement => self.displacement(),
            Stage::RotationGroup => self.rotation_group(),
            Stage::Construct => self.construct(),
            Stage::Composition => self.composition(),
        }
    }

    fn rep(&self) -> &AffineRepresentation {
        self.rep.as_ref().expect("pipeline validated: represent ran")
    }

    fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15))
    }

    fn classify(&mut self) -> Result<Value, StageFailure> {
        let c = classify(&self.a)?;
        let ex = &self.sc.expect;
        let st = Stage::Classify;
        if let Some(cp) = &ex.charpoly {
            let want: Vec<String> = cp.iter().map(|e| crate::exactmath::format_rational(&e.0)).collect();
            let got: Vec<String> = c.charpoly.coeffs().iter().map(crate::exactmath::format_rational).collect();
            self.verdicts.push(Verdict::eq(st, "charpoly", got, want));
        }
        if let Some(b) = ex.irreducible {
            self.verdicts.push(Verdict::eq(st, "irreducible over Q", c.irreducible_over_q, b));
        }
        if let Some(b) = ex.hyperbolic {
            self.verdicts.push(Verdict::eq(st, "hyperbolic", c.hyperbolic, b));
        }
        if let Some(b) = ex.positive_real_eigenvalue {
            self.verdicts.push(Verdict::eq(st, "positive real eigenvalue", c.has_positive_real_eigenvalue, b));
        }
        let mut v = to_value(&c);
        v["charpoly_display"] = json!(c.charpoly.to_string());
        self.class = Some(c);
        Ok(v)
    }

    fn splitting(&mut self) -> Result<Value, StageFailure> {
        let s = splitting(&self.a)?;
        let at = self.a.transpose().to_f64();
        let inv = s.invariance_residual(&at);
        self.verdicts.push(Verdict::lt(Stage::Splitting, "invariance residual", inv, self.sc.tolerances.relation_tol));
        let v = json!({
            "dims": { "stable": s.stable.ncols(), "unstable": s.unstable.ncols(), "central": s.central.ncols(), "central_star": s.central_star.ncols() },
            "contraction_rate": s.contraction_rate,
            "expansion_rate": s.expansion_rate,
            "central_star_eigenvalue": s.central_star_eigenvalue,
            "invariance_residual": inv,
            "reconstruction_residual": s.reconstruction_residual(),
        });
        self.split = Some(s);
        Ok(v)
    }

    fn represent(&mut self) -> Result<Value, StageFailure> {
        let rep = synthesize(&self.a)?;
        let r = rep.report();
        self.verdicts.push(Verdict::eq(Stage::Represent, "eigen equation A^T t = lambda t (exact)", r.eigen_equation_exact, true));
        if let Some(b) = self.sc.expect.faithful {
            self.verdicts.push(Verdict::eq(Stage::Represent, "faithful", r.faithfulness.faithful, b));
        }
        self.rep = Some(rep);
        Ok(to_value(&r))
    }

    fn homomorphism(&mut self) -> Result<Value, StageFailure> {
        let trials = self.sc.audits.homomorphism_trials.unwrap_or(500);
        let mut rng = self.rng(1);
        let h = homomorphism_check(self.rep(), trials, &mut rng)?;
        self.verdicts.push(Verdict::eq(Stage::Homomorphism, "violations (exact)", h.violations, 0));
        Ok(to_value(&h))
    }

    fn multiplier(&mut self) -> Result<Value, StageFailure> {
        let spec = &self.sc.audits.multiplier;
        let mut out = Vec::new();
        for &chart in &spec.charts {
            let act = chart_conjugate(self.rep(), chart);
            for &k in &spec.powers {
                let g = GroupElement::new(k, act.context().identity().v);
                let a = multiplier_audit(&act, &g, self.rep(), &self.sc.tolerances)?;
                self.verdicts.push(Verdict::le(
                    Stage::MultiplierAudit,
                    format!("|Da^{k}(p) - lambda^{k}| ({})", chart.name()),
                    a.error,
                    a.tolerance,
                ));
                out.push(json!({ "chart": chart.name(), "audit": a }));
            }
        }
        Ok(Value::Array(out))
    }

    fn displacement(&mut self) -> Result<Value, StageFailure> {
        let spec = &self.sc.audits.displacement;
        let act = chart_conjugate(self.rep(), spec.chart);
        let split = self.split.as_ref().expect("pipeline validated: splitting ran");
        let tr = displacement_track(&act, split, spec.x0, spec.steps, spec.anchor, self.sc.tolerances.cone_eps)?;
        let mut csv = Vec::new();
        tr.write_csv(&mut csv).expect("in-memory write");
        self.artifacts.push((self.sc.outputs.displacement_csv.clone(), String::from_utf8(csv).expect("utf8")));
        Ok(json!({
            "chart": spec.chart.name(),
            "x0": spec.x0,
            "steps": spec.steps,
            "anchor": tr.anchor,
            "da_inv_anchor": tr.da_inv_anchor,
            "residuals": tr.residuals,
            "enters_cone_at": tr.enters_cone_at,
            "kappa_in_cone": tr.kappa_in_cone,
            "final_direction": tr.final_direction(),
        }))
    }

    fn rotation_group(&mut self) -> Result<Value, StageFailure> {
        let g = rotation_vector_group(&self.a)?;
        if let Some(o) = self.sc.expect.rotation_group_order {
            self.verdicts.push(Verdict::eq(Stage::RotationGroup, "order", g.order.clone(), o.to_string()));
        }
        Ok(to_value(&g))
    }

    fn composition(&mut self) -> Result<Value, StageFailure> {
        let spec = &self.sc.audits.composition;
        let eta = self.sc.tolerances.eta;
        let h = composition_harness(spec.trials, self.seed, eta, spec.k_max)?;
        self.verdicts.push(Verdict::eq(Stage::Composition, format!("violations of residual <= {eta}*max displacement"), h.violations, 0));
        let roots: Vec<_> = spec.flow_root_q.iter().map(|&q| flow_root_check(q, spec.flow_root_points, self.seed, eta)).collect();
        for r in &roots {
            self.verdicts.push(Verdict::eq(Stage::Composition, format!("flow-root violations q={}", r.q), r.violations, 0));
        }
        Ok(json!({ "harness": h, "flow_roots": roots }))
    }

    fn construct(&mut self) -> Result<Value, StageFailure> {
        let c = self.sc.construction.clone().expect("pipeline validated: construction present");
        match &c {
            Construction::Gs { base, pairs, grid, residual_tol, expect_plateau } => {
                self.construct_gs(base.clone(), *pairs, *grid, *residual_tol, *expect_plateau)
            }
            Construction::Flowblock { s, dichotomy, probe, .. } => self.construct_flowblock(&c, s.clone(), *dichotomy, *probe),
            Construction::Denjoy { iterates, .. } => {
                let spec = c.denjoy_spec().expect("denjoy variant");
                let act = denjoy_circle_build(&self.a, &spec)?;
                let audit = act.audit(*iterates)?;
                let st = Stage::Construct;
                let tol = &self.sc.tolerances;
                self.verdicts.push(Verdict::lt(st, "|rho(a) - target|", audit.rotation_target_error, 1e-4));
                self.verdicts.push(Verdict::eq(st, "no periodic point of a (k <= 20)", audit.periodic.pass, true));
                for (i, r) in audit.rotation_b.iter().enumerate() {
                    self.verdicts.push(Verdict::le(st, format!("|rho(b{})|", i + 1), r.value.abs(), r.error_bar));
                }
                self.verdicts.push(Verdict::lt(st, "relation residual on gap samples", audit.relations.max, tol.relation_tol));
                self.verdicts.push(Verdict::lt(st, "lift error", audit.lift_error, 1e-10));
                Ok(json!({ "kind": "denjoy", "spec": spec, "audit": audit }))
            }
        }
    }

    fn construct_gs(
        &mut self,
        base: BaseRecipe,
        pairs: usize,
        grid_n: usize,
        tol: f64,
        expect_plateau: Option<bool>,
    ) -> Result<Value, StageFailure> {
        let n = gs_degree(&self.a).ok_or_else(|| fail("Precondition", "Ghys-Sergiescu actions need A = [[n]] with an integer n >= 2"))?;
        let act = gs_build(n, base)?;
        let st = Stage::Construct;
        let grid = interior_grid(-1.0, 2.0, grid_n);
        let cond = act.base().condition_residual(1001);
        self.verdicts.push(Verdict::le(st, "sup |f(x+1) - f(x) - n|", cond, 1e-10));
        let rel = relation_residuals(&act, &grid)?;
        self.verdicts.push(Verdict::lt(st, "relation residual", rel.max, tol));
        let mut rng = self.rng(2);
        let (wd, hom) = gs_random_checks(&act, &mut rng, pairs, &grid)?;
        self.verdicts.push(Verdict::lt(st, "well-definedness residual", wd, tol));
        self.verdicts.push(Verdict::lt(st, "homomorphism residual", hom, tol));
        let rep = synthesize(&self.a)?;
        let f = conjugacy_extract(&act, &rep, 0.0, &interior_grid(-1.0, 2.0, 3000), &ExtractOptions::default())?;
        let widest = f.widest_plateau();
        self.verdicts.push(Verdict::eq(st, "translation coordinate monotone", f.is_monotone(), true));
        match expect_plateau {
            Some(true) => self.verdicts.push(Verdict::gt(st, "widest plateau of translation coordinate", widest, 1e-3)),
            Some(false) => self.verdicts.push(Verdict::le(st, "widest plateau of translation coordinate", widest, 1e-3)),
            None => {}
        }
        Ok(json!({
            "kind": "gs",
            "n": n,
            "base": act.base(),
            "condition_residual": cond,
            "relations": rel,
            "well_definedness_residual": wd,
            "homomorphism_residual": hom,
            "pairs": pairs,
            "grid": grid_n,
            "plateaus": f.plateaus,
            "widest_plateau": widest,
            "extraction_level": f.level,
        }))
    }

    fn construct_flowblock(&mut self, c: &Construction, s: SChoice, dichotomy: bool, probe: bool) -> Result<Value, StageFailure> {
        let st = Stage::Construct;
        let tol = self.sc.tolerances.relation_tol;
        let spec = c.flowblock_spec(s).expect("flowblock variant");
        let act = flowblock_build(&self.a, &spec)?;
        let t0 = act.t0_f64();
        let mut out = json!({ "kind": "flowblock", "s": act.s().as_slice(), "irreducible": act.irreducible() });
        out["main"] = self.flowblock_checks(&act, tol, "");
        let profile = act.multiplier_profile(&t0);
        let mut csv = Vec::new();
        profile.write_csv(&mut csv).expect("in-memory write");
        self.artifacts.push((self.sc.outputs.profile_csv.clone(), String::from_utf8(csv).expect("utf8")));
        out["profile"] = to_value(&profile);
        if probe {
            let v = faithfulness_probe(&act, &spec.t0)?;
            self.verdicts.push(Verdict::eq(st, "faithfulness probe is consistent", v.status != ProbeStatus::Inconsistent, true));
            if act.irreducible() && t0.iter().any(|&x| x != 0.0) {
                self.verdicts.push(Verdict::eq(st, "faithfulness probe finds a moved point", v.status == ProbeStatus::Faithful, true));
            }
            out["probe"] = to_value(&v);
        }
        if dichotomy {
            let mut parts = serde_json::Map::new();
            for (label, choice, bound) in [("central-star", SChoice::CentralStar, 10.0), ("unstable", SChoice::Unstable, 1e3)] {
                let a = flowblock_build(&self.a, &c.flowblock_spec(choice).expect("flowblock variant"))?;
                let p = a.multiplier_profile(&t0);
                let check = format!("sup |c_k| / |c_0| over |k| <= {} ({label})", spec.range);
                self.verdicts.push(if label == "unstable" {
                    Verdict::gt(st, check, p.sup_over_c0, bound)
                } else {
                    Verdict::lt(st, check, p.sup_over_c0, bound)
                });
                let checks = self.flowblock_checks(&a, tol, label);
                parts.insert(label.into(), json!({ "s": a.s().as_slice(), "sup_over_c0": p.sup_over_c0, "sup_over_inf": p.sup_over_inf, "checks": checks }));
            }
            out["dichotomy"] = Value::Object(parts);
        }
        Ok(out)
    }

    fn flowblock_checks(&mut self, act: &FlowBlockAction, tol: f64, label: &str) -> Value {
        let st = Stage::Construct;
        let suffix = if label.is_empty() { String::new() } else { format!(" ({label})") };
        let mut grid = Vec::new();
        for j in -6..6 {
            let (lo, hi) = (act.sigma(j), act.sigma(j + 1));
            grid.extend((0..50).map(|i| lo + (hi - lo) * (i as f64 + 0.5) / 50.0));
        }
        let rel = relation_residuals(act, &grid);
        let t = act.t0_f64();
        let ext = act.extension_residual(&t, 5, 20);
        let ends = act.endpoint_residual(30);
        match &rel {
            Ok(r) => self.verdicts.push(Verdict::lt(st, format!("relation residual{suffix}"), r.max, tol)),
            Err(_) => self.verdicts.push(Verdict::eq(st, format!("relation residual computed{suffix}"), false, true)),
        }
        self.verdicts.push(Verdict::lt(st, format!("block extension residual{suffix}"), ext, tol));
        self.verdicts.push(Verdict::lt(st, format!("f(I_k) = I_(k+1) endpoint residual{suffix}"), ends, 1e-10));
        json!({ "relations": rel.ok(), "extension_residual": ext, "endpoint_residual": ends })
    }
}

fn gs_degree(a: &RationalMatrix) -> Option<u32> {
    if a.rows() != 1 || !a.is_integral() {
        return None;
    }
    let n: i64 = a.get(0, 0).to_integer().try_into().ok()?;
    (2..=1000).contains(&n).then_some(n as u32)
}

/// Largest well-definedness and homomorphism residuals over random
/// `(p, q)` encodings and random pairs `a^k b^{p/n^q}`.
fn gs_random_checks(act: &GsAction, rng: &mut ChaCha8Rng, pairs: usize, grid: &[f64]) -> Result<(f64, f64), DynamicsError> {
    let n = act.n() as i64;
    let mut wd: f64 = 0.0;
    let mut hom: f64 = 0.0;
    for _ in 0..pairs {
        let p = rng.gen_range(-20..=20);
        let q = rng.gen_range(0..=4u32);
        wd = wd.max(act.well_definedness_residual(p, q, grid));
        let mut el = || {
            let q = rng.gen_range(0..=4u32);
            GroupElement::new(rng.gen_range(-3..=3), vec![ratio(rng.gen_range(-32..=32), n.pow(q))])
        };
        let (g1, g2) = (el(), el());
        hom = hom.max(homomorphism_residual(act, &g1, &g2, grid)?);
    }
    Ok((wd, hom))
}

/// Elapsed wall time of `f` in seconds, for callers that report runtimes.
pub fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed().as_secs_f64())
}
