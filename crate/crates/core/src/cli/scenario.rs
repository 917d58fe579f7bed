//! Scenario files: one JSON document per run, rationals as strings.

use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::constructions::{BaseRecipe, DenjoySpec, FlowBlockSpec, SChoice};
use crate::dynamics1d::{Chart, Tolerances};
use crate::exactmath::rational::{format_rational, parse_rational, serde_rational};
use crate::exactmath::{Rational, RationalMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    Classify,
    Splitting,
    Represent,
    Homomorphism,
    MultiplierAudit,
    Displacement,
    RotationGroup,
    Construct,
    Composition,
}

impl Stage {
    pub fn name(&self) -> &'static str {
        match self {
            Stage::Classify => "classify",
            Stage::Splitting => "splitting",
            Stage::Represent => "represent",
            Stage::Homomorphism => "homomorphism",
            Stage::MultiplierAudit => "multiplier-audit",
            Stage::Displacement => "displacement",
            Stage::RotationGroup => "rotation-group",
            Stage::Construct => "construct",
            Stage::Composition => "composition",
        }
    }

    /// Stages that must run earlier in the pipeline.
    pub fn requires(&self) -> &'static [Stage] {
        match self {
            Stage::Homomorphism | Stage::MultiplierAudit => &[Stage::Represent],
            Stage::Displacement => &[Stage::Represent, Stage::Splitting],
            _ => &[],
        }
    }
}

/// A matrix entry: a `"p/q"` string or a JSON integer.
#[derive(Clone, Debug, PartialEq)]
pub struct Entry(pub Rational);

impl<'de> Deserialize<'de> for Entry {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Entry;
            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("a rational string \"p/q\" or an integer")
            }
            fn visit_str<E: de::Error>(self, s: &str) -> Result<Entry, E> {
                parse_rational(s).map(Entry).map_err(E::custom)
            }
            fn visit_i64<E: de::Error>(self, n: i64) -> Result<Entry, E> {
                Ok(Entry(Rational::from_integer(n.into())))
            }
            fn visit_u64<E: de::Error>(self, n: u64) -> Result<Entry, E> {
                Ok(Entry(Rational::from_integer(n.into())))
            }
        }
        d.deserialize_any(V)
    }
}

impl Serialize for Entry {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(&self.0))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MatrixRows(pub Vec<Vec<Entry>>);

impl<'de> Deserialize<'de> for MatrixRows {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = MatrixRows;
            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("a non-empty square array of rows")
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<MatrixRows, A::Error> {
                let mut rows: Vec<Vec<Entry>> = Vec::new();
                while let Some(row) = seq.next_element::<Vec<Entry>>()? {
                    rows.push(row);
                }
                let n = rows.len();
                if n == 0 || rows.iter().any(|r| r.len() != n) {
                    return Err(de::Error::custom(format!("matrix must be square and non-empty, got {n} rows")));
                }
                Ok(MatrixRows(rows))
            }
        }
        d.deserialize_seq(V)
    }
}

impl Serialize for MatrixRows {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.0.len()))?;
        for r in &self.0 {
            seq.serialize_element(r)?;
        }
        seq.end()
    }
}

impl MatrixRows {
    pub fn to_matrix(&self) -> RationalMatrix {
        RationalMatrix::from_rows(self.0.iter().map(|r| r.iter().map(|e| e.0.clone()).collect()).collect())
            .expect("rows validated as square")
    }

    pub fn from_matrix(m: &RationalMatrix) -> Self {
        MatrixRows(m.to_rows().into_iter().map(|r| r.into_iter().map(Entry).collect()).collect())
    }
}

fn default_pairs() -> usize {
    50
}

fn default_grid() -> usize {
    10_000
}

fn default_gs_tol() -> f64 {
    1e-9
}

fn default_iterates() -> u64 {
    100_000
}

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Construction {
    Gs {
        base: BaseRecipe,
        /// Random pairs for the homomorphism and well-definedness checks.
        #[serde(default = "default_pairs")]
        pairs: usize,
        #[serde(default = "default_grid")]
        grid: usize,
        #[serde(default = "default_gs_tol")]
        residual_tol: f64,
        /// `Some(true)`: the translation coordinate must have a plateau wider than 1e-3.
        #[serde(default)]
        expect_plateau: Option<bool>,
    },
    Flowblock {
        s: SChoice,
        #[serde(with = "serde_rational::vec")]
        t0: Vec<Rational>,
        #[serde(default = "default_ratio")]
        ratio: f64,
        #[serde(default = "default_range")]
        range: i64,
        /// Also build the `E^c_*` and `E^u` variants and check the multiplier dichotomy.
        #[serde(default)]
        dichotomy: bool,
        #[serde(default = "default_true")]
        probe: bool,
    },
    Denjoy {
        #[serde(default)]
        rotation: Option<f64>,
        #[serde(default)]
        gap_budget: Option<f64>,
        #[serde(default)]
        gap_count: Option<usize>,
        #[serde(default)]
        s: Option<Vec<f64>>,
        #[serde(default = "default_iterates")]
        iterates: u64,
    },
}

fn default_ratio() -> f64 {
    2.0
}

fn default_range() -> i64 {
    40
}

impl Construction {
    pub fn flowblock_spec(&self, s: SChoice) -> Option<FlowBlockSpec> {
        match self {
            Construction::Flowblock { t0, ratio, range, .. } => Some(FlowBlockSpec { s, t0: t0.clone(), ratio: *ratio, range: *range }),
            _ => None,
        }
    }

    pub fn denjoy_spec(&self) -> Option<DenjoySpec> {
        match self {
            Construction::Denjoy { rotation, gap_budget, gap_count, s, .. } => {
                let d = DenjoySpec::default();
                Some(DenjoySpec {
                    rotation: rotation.unwrap_or(d.rotation),
                    gap_budget: gap_budget.unwrap_or(d.gap_budget),
                    gap_count: gap_count.unwrap_or(d.gap_count),
                    s: s.clone(),
                })
            }
            _ => None,
        }
    }
}

fn default_charts() -> Vec<Chart> {
    vec![Chart::Logistic, Chart::MtFlat]
}

fn default_powers() -> Vec<i64> {
    vec![1]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultiplierSpec {
    #[serde(default = "default_charts")]
    pub charts: Vec<Chart>,
    /// Powers `k` of `a` whose derivative at the fixed point is compared with `λ^k`.
    #[serde(default = "default_powers")]
    pub powers: Vec<i64>,
}

impl Default for MultiplierSpec {
    fn default() -> Self {
        MultiplierSpec { charts: default_charts(), powers: default_powers() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DisplacementSpec {
    pub chart: Chart,
    pub x0: f64,
    pub steps: usize,
    /// Fixed point of `a` that `a⁻¹` contracts the orbit toward.
    pub anchor: f64,
}

impl Default for DisplacementSpec {
    fn default() -> Self {
        DisplacementSpec { chart: Chart::MtFlat, x0: 0.9, steps: 12, anchor: 0.5 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompositionSpec {
    pub trials: usize,
    pub k_max: usize,
    pub flow_root_q: Vec<u32>,
    pub flow_root_points: usize,
}

impl Default for CompositionSpec {
    fn default() -> Self {
        CompositionSpec { trials: 1000, k_max: 6, flow_root_q: vec![2, 3, 5], flow_root_points: 100 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Audits {
    pub homomorphism_trials: Option<usize>,
    pub multiplier: MultiplierSpec,
    pub displacement: DisplacementSpec,
    pub composition: CompositionSpec,
}

/// Expected exact facts; each present field becomes a verdict.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Expectations {
    /// Ascending coefficients of the characteristic polynomial.
    pub charpoly: Option<Vec<Entry>>,
    pub irreducible: Option<bool>,
    pub hyperbolic: Option<bool>,
    pub positive_real_eigenvalue: Option<bool>,
    pub faithful: Option<bool>,
    pub rotation_group_order: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Outputs {
    pub report: String,
    pub profile_csv: String,
    pub displacement_csv: String,
}

impl Default for Outputs {
    fn default() -> Self {
        Outputs { report: "report.json".into(), profile_csv: "profile.csv".into(), displacement_csv: "displacement.csv".into() }
    }
}

fn default_pipeline() -> Vec<Stage> {
    vec![Stage::Classify, Stage::Represent]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub matrix: MatrixRows,
    #[serde(default = "default_pipeline")]
    pub pipeline: Vec<Stage>,
    #[serde(default)]
    pub construction: Option<Construction>,
    #[serde(default)]
    pub audits: Audits,
    #[serde(default)]
    pub expect: Expectations,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub outputs: Outputs,
}

/// Parse or validation failure with the JSON path of the offending field.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InputError {
    pub path: String,
    pub message: String,
}

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

impl Scenario {
    pub fn parse(bytes: &[u8]) -> Result<Scenario, InputError> {
        let de = &mut serde_json::Deserializer::from_slice(bytes);
        let sc: Scenario = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            InputError { path: if path == "." { "$".into() } else { path }, message: e.into_inner().to_string() }
        })?;
        sc.validate()?;
        Ok(sc)
    }

    pub fn validate(&self) -> Result<(), InputError> {
        if let Some(f) = self.tolerances.invalid_field() {
            return Err(InputError { path: format!("tolerances.{f}"), message: "must be positive".into() });
        }
        for (i, st) in self.pipeline.iter().enumerate() {
            for req in st.requires() {
                if !self.pipeline[..i].contains(req) {
                    return Err(InputError {
                        path: format!("pipeline[{i}]"),
                        message: format!("stage {} requires {} earlier in the pipeline", st.name(), req.name()),
                    });
                }
            }
            if self.pipeline[..i].contains(st) {
                return Err(InputError { path: format!("pipeline[{i}]"), message: format!("stage {} listed twice", st.name()) });
            }
            if *st == Stage::Construct && self.construction.is_none() {
                return Err(InputError { path: "construction".into(), message: "construct stage needs a construction block".into() });
            }
        }
        Ok(())
    }

    pub fn matrix(&self) -> RationalMatrix {
        self.matrix.to_matrix()
    }

    /// Canonical JSON, used when a scenario is built on the command line.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("scenario serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_denominator_reports_path() {
        let err = Scenario::parse(br#"{"name":"x","matrix":[["1","1/0"],["0","1"]]}"#).unwrap_err();
        assert_eq!(err.path, "matrix[0][1]");
        assert!(err.message.contains("denominator"), "{}", err.message);
    }

    #[test]
    fn integers_and_strings_accepted() {
        let sc = Scenario::parse(br#"{"name":"x","matrix":[[0,"-1"],[1,"0"]]}"#).unwrap();
        assert_eq!(sc.matrix(), RationalMatrix::from_i64(&[&[0, -1], &[1, 0]]));
        assert_eq!(sc.pipeline, vec![Stage::Classify, Stage::Represent]);
    }

    #[test]
    fn validation_paths() {
        let e = Scenario::parse(br#"{"name":"x","matrix":[["2"]],"pipeline":["multiplier-audit"]}"#).unwrap_err();
        assert_eq!(e.path, "pipeline[0]");
        let e = Scenario::parse(br#"{"name":"x","matrix":[["2"]],"tolerances":{"eta":-1}}"#).unwrap_err();
        assert_eq!(e.path, "tolerances.eta");
        let e = Scenario::parse(br#"{"name":"x","matrix":[["2","1"]]}"#).unwrap_err();
        assert_eq!(e.path, "matrix");
        let e = Scenario::parse(br#"{"name":"x","matrix":[["2"]],"bogus":1}"#).unwrap_err();
        assert!(e.message.contains("bogus"));
    }

    #[test]
    fn round_trip() {
        let sc = Scenario::parse(br#"{"name":"x","matrix":[["1/2"]],"construction":{"kind":"denjoy"}}"#).unwrap();
        let back = Scenario::parse(sc.to_json().as_bytes()).unwrap();
        assert_eq!(sc, back);
    }
}
