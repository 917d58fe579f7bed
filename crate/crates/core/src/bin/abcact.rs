use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use abcact::cli::{execute, execute_stages, ExitStatus, InputError, Outcome, Scenario, Stage};

#[derive(Parser)]
#[command(name = "abcact", version, about = "Classify, represent and audit actions of Z ⋉_A Q^d on the line and circle")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct Common {
    /// Override the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Write the report and CSV artifacts into this directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report format on stdout.
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct Input {
    /// Scenario JSON file.
    #[arg(long, conflicts_with = "matrix")]
    scenario: Option<PathBuf>,
    /// Matrix as JSON rows, e.g. '[[0,-1],[1,0]]' or '[["1/2","0"],["0","2"]]'.
    #[arg(long)]
    matrix: Option<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run every stage listed in the scenario.
    Run {
        #[arg(long)]
        scenario: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Exact spectral classification.
    Classify {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        common: Common,
    },
    /// Affine representation synthesis.
    Represent {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        common: Common,
    },
    /// Build and audit the construction block of a scenario.
    Construct {
        #[arg(long)]
        scenario: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Property harnesses and audits.
    Verify {
        #[command(subcommand)]
        kind: VerifyKind,
    },
}

#[derive(Subcommand)]
enum VerifyKind {
    /// Composition estimate harness with flow-root checks.
    #[command(name = "bonatti")]
    Composition {
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 6)]
        k_max: usize,
        #[arg(long)]
        eta: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Derivative at the interior fixed point against lambda^k.
    Multiplier {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        common: Common,
    },
    /// Order of the rotation-vector group.
    RotationGroup {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        common: Common,
    },
}

fn input_error(path: &str, message: impl Into<String>) -> InputError {
    InputError { path: path.into(), message: message.into() }
}

fn read_scenario(path: &Path) -> Result<(Scenario, Vec<u8>), InputError> {
    let bytes = std::fs::read(path).map_err(|e| input_error("--scenario", format!("{}: {e}", path.display())))?;
    let sc = Scenario::parse(&bytes)?;
    Ok((sc, bytes))
}

fn scenario_from_matrix(text: &str, name: &str) -> Result<(Scenario, Vec<u8>), InputError> {
    let matrix: serde_json::Value = serde_json::from_str(text).map_err(|e| input_error("--matrix", e.to_string()))?;
    let bytes = serde_json::to_vec(&json!({ "name": name, "matrix": matrix, "pipeline": [] })).expect("json");
    let sc = Scenario::parse(&bytes)?;
    let canonical = sc.to_json().into_bytes();
    Ok((sc, canonical))
}

fn load(input: &Input, name: &str) -> Result<(Scenario, Vec<u8>), InputError> {
    match (&input.scenario, &input.matrix) {
        (Some(p), _) => read_scenario(p),
        (None, Some(m)) => scenario_from_matrix(m, name),
        (None, None) => Err(input_error("--scenario", "either --scenario or --matrix is required")),
    }
}

fn dispatch(cmd: Cmd) -> Result<(Outcome, Common, String), InputError> {
    Ok(match cmd {
        Cmd::Run { scenario, common } => {
            let (sc, bytes) = read_scenario(&scenario)?;
            (execute(&sc, &bytes, common.seed), common, sc.outputs.report.clone())
        }
        Cmd::Classify { input, common } => {
            let (sc, bytes) = load(&input, "classify")?;
            (execute_stages(&sc, &bytes, &[Stage::Classify], common.seed)?, common, sc.outputs.report.clone())
        }
        Cmd::Represent { input, common } => {
            let (sc, bytes) = load(&input, "represent")?;
            (execute_stages(&sc, &bytes, &[Stage::Represent, Stage::Homomorphism], common.seed)?, common, sc.outputs.report.clone())
        }
        Cmd::Construct { scenario, common } => {
            let (sc, bytes) = read_scenario(&scenario)?;
            (execute_stages(&sc, &bytes, &[Stage::Construct], common.seed)?, common, sc.outputs.report.clone())
        }
        Cmd::Verify { kind } => match kind {
            VerifyKind::Composition { trials, k_max, eta, common } => {
                let mut tol = json!({});
                if let Some(e) = eta {
                    tol["eta"] = json!(e);
                }
                let doc = json!({
                    "name": "composition-harness",
                    "matrix": [["2"]],
                    "pipeline": ["composition"],
                    "audits": { "composition": { "trials": trials, "k_max": k_max } },
                    "tolerances": tol,
                    "seed": common.seed.unwrap_or(0),
                });
                let sc = Scenario::parse(&serde_json::to_vec(&doc).expect("json"))?;
                let bytes = sc.to_json().into_bytes();
                (execute(&sc, &bytes, common.seed), common, sc.outputs.report.clone())
            }
            VerifyKind::Multiplier { input, common } => {
                let (sc, bytes) = load(&input, "multiplier")?;
                (execute_stages(&sc, &bytes, &[Stage::Represent, Stage::MultiplierAudit], common.seed)?, common, sc.outputs.report.clone())
            }
            VerifyKind::RotationGroup { input, common } => {
                let (sc, bytes) = load(&input, "rotation-group")?;
                (execute_stages(&sc, &bytes, &[Stage::RotationGroup], common.seed)?, common, sc.outputs.report.clone())
            }
        },
    })
}

fn write_out(dir: &Path, out: &Outcome, report_name: &str) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(report_name), out.report.to_json())?;
    for (name, body) in &out.artifacts {
        std::fs::write(dir.join(name), body)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (outcome, common, report_name) = match dispatch(cli.cmd) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("{}", json!({ "error": { "kind": "InputError", "path": e.path, "message": e.message } }));
            return ExitCode::from(ExitStatus::InputError.code() as u8);
        }
    };
    match common.format {
        Format::Json => print!("{}", outcome.report.to_json()),
        Format::Csv => print!("{}", outcome.report.verdicts_csv()),
    }
    if let Some(dir) = &common.out {
        if let Err(e) = write_out(dir, &outcome, &report_name) {
            eprintln!("{}", json!({ "error": { "kind": "InputError", "path": "--out", "message": e.to_string() } }));
            return ExitCode::from(ExitStatus::InputError.code() as u8);
        }
    }
    for st in &outcome.report.stages {
        if let Some(err) = &st.error {
            eprintln!("stage {} failed precondition: {} ({})", st.stage.name(), err.kind, err.message);
        }
    }
    ExitCode::from(outcome.report.exit_code as u8)
}
