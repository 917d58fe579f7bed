//! Binary64 homeomorphisms of the interval, the line and the circle, and the
//! numerical audits run on group actions built from them.

pub mod action;
pub mod audit;
pub mod chart;
pub mod composition;
pub mod conjugacy;
pub mod displacement;
pub mod flows;
pub mod map;

use serde::{Deserialize, Serialize};

pub use action::{chart_conjugate, homomorphism_residual, interior_grid, relation_residuals, ChartAction, GroupAction, RelationResiduals};
pub use audit::{locate_fixed_point, multiplier_audit, richardson_derivative, MultiplierAudit};
pub use chart::Chart;
pub use composition::{
    calibrated_delta, composition_estimate_test, composition_harness, flow_root_check, CompositionVerdict, FlowRootReport,
    HarnessReport,
};
pub use conjugacy::{conjugacy_extract, CoordinateFunction};
pub use displacement::{displacement_track, DisplacementTrack, DisplacementVector};
pub use map::{Domain, IntervalMap, MapCheck};

use crate::affinerep::RepError;
use crate::spectral::SpectralError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DynamicsError {
    #[error("no sign change of f(x) - x on the search interval")]
    NoInteriorFixedPoint,
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("displacement vector vanishes at x = {0}")]
    DegenerateDisplacement(f64),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid element: {0}")]
    InvalidElement(String),
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// Harness parameters. All fields must be positive.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Slack in the composition estimate.
    pub eta: f64,
    /// Near-identity radius; `None` means calibrate from `eta` and the word length.
    pub delta: Option<f64>,
    pub fd_steps: [f64; 3],
    pub derivative_tol: f64,
    pub fixed_point_width: f64,
    pub relation_tol: f64,
    pub grid: usize,
    pub fine_grid: usize,
    pub cone_eps: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            eta: 0.1,
            delta: None,
            fd_steps: [1e-4, 5e-5, 2.5e-5],
            derivative_tol: 1e-6,
            fixed_point_width: 1e-14,
            relation_tol: 1e-8,
            grid: 1000,
            fine_grid: 10_000,
            cone_eps: 0.2,
        }
    }
}

impl Tolerances {
    /// Name of the first non-positive field, if any.
    pub fn invalid_field(&self) -> Option<&'static str> {
        let checks: [(&str, bool); 9] = [
            ("eta", self.eta > 0.0),
            ("delta", self.delta.is_none_or(|d| d > 0.0)),
            ("fd_steps", self.fd_steps.iter().all(|&h| h > 0.0)),
            ("derivative_tol", self.derivative_tol > 0.0),
            ("fixed_point_width", self.fixed_point_width > 0.0),
            ("relation_tol", self.relation_tol > 0.0),
            ("grid", self.grid > 1),
            ("fine_grid", self.fine_grid > 1),
            ("cone_eps", self.cone_eps > 0.0),
        ];
        checks.iter().find(|(_, ok)| !ok).map(|(n, _)| *n)
    }
}
