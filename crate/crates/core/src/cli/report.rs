use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use super::scenario::Stage;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExitStatus {
    Pass = 0,
    VerdictFailure = 1,
    InputError = 2,
    PreconditionFailure = 3,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

/// A pass/fail check together with the threshold it was judged against.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub stage: Stage,
    pub check: String,
    pub measured: Value,
    /// One of `<`, `<=`, `>`, `==`.
    pub relation: &'static str,
    pub threshold: Value,
    pub pass: bool,
}

impl Verdict {
    pub fn lt(stage: Stage, check: impl Into<String>, measured: f64, threshold: f64) -> Self {
        Verdict { stage, check: check.into(), measured: num(measured), relation: "<", threshold: num(threshold), pass: measured < threshold }
    }

    pub fn le(stage: Stage, check: impl Into<String>, measured: f64, threshold: f64) -> Self {
        Verdict { stage, check: check.into(), measured: num(measured), relation: "<=", threshold: num(threshold), pass: measured <= threshold }
    }

    pub fn gt(stage: Stage, check: impl Into<String>, measured: f64, threshold: f64) -> Self {
        Verdict { stage, check: check.into(), measured: num(measured), relation: ">", threshold: num(threshold), pass: measured > threshold }
    }

    pub fn eq<T: Serialize + PartialEq>(stage: Stage, check: impl Into<String>, measured: T, expected: T) -> Self {
        let pass = measured == expected;
        Verdict {
            stage,
            check: check.into(),
            measured: serde_json::to_value(measured).unwrap_or(Value::Null),
            relation: "==",
            threshold: serde_json::to_value(expected).unwrap_or(Value::Null),
            pass,
        }
    }
}

fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or_else(|| Value::String(x.to_string()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StageStatus {
    Ok,
    PreconditionFailed,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StageError {
    pub kind: String,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StageRecord {
    pub stage: Stage,
    pub status: StageStatus,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub result: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<StageError>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub scenario: String,
    pub scenario_sha256: String,
    pub seed: u64,
}

impl Provenance {
    pub fn new(scenario: &str, bytes: &[u8], seed: u64) -> Self {
        Provenance {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            scenario: scenario.to_string(),
            scenario_sha256: hex::encode(Sha256::digest(bytes)),
            seed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub provenance: Provenance,
    pub stages: Vec<StageRecord>,
    pub verdicts: Vec<Verdict>,
    pub pass: bool,
    pub exit_status: ExitStatus,
    pub exit_code: i32,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    /// One row per verdict: `stage,check,measured,relation,threshold,pass`.
    pub fn verdicts_csv(&self) -> String {
        let mut out = String::from("stage,check,measured,relation,threshold,pass\n");
        for v in &self.verdicts {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                v.stage.name(),
                csv_field(&v.check),
                csv_field(&plain(&v.measured)),
                v.relation,
                csv_field(&plain(&v.threshold)),
                v.pass
            ));
        }
        out
    }
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
