//! Explicit actions: Ghys–Sergiescu actions of `BS(1,n)` on the line,
//! flow-block actions on `[0,1]`, Denjoy-type circle actions, and the
//! rotation-vector group.

pub mod denjoy;
pub mod flowblock;
pub mod gs;
pub mod rotation;

pub use denjoy::{denjoy_circle_build, DenjoyAction, DenjoySpec};
pub use flowblock::{faithfulness_probe, flowblock_build, FlowBlockAction, FlowBlockSpec, ProbeVerdict, SChoice};
pub use gs::{gs_build, BaseRecipe, GsAction, GsBase};
pub use rotation::{rotation_number_estimate, rotation_vector_group, RotationEstimate, RotationGroup};

use crate::dynamics1d::DynamicsError;
use crate::exactmath::ExactError;
use crate::groupcore::GroupError;
use crate::spectral::SpectralError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConstructionError {
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("geometry error: {0}")]
    Geometry(String),
    #[error("det(A^T - I) = 0: rotation vectors form an infinite family")]
    InfiniteFamily,
    #[error("inconsistency: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Exact(#[from] ExactError),
}
