//! Perfect-fluid classification: decomposition of the Ricci tensor and every
//! structural check that follows from a closed velocity and divergence-free
//! Weyl tensor.
//!
//! These run in double precision; the decomposition relies on `nalgebra`'s
//! non-symmetric eigen-solver.

pub mod checks;
pub mod fluid;
pub mod frame;
pub mod ladder;
pub mod potential;

use thiserror::Error;

use crate::chart::ChartError;
use crate::curvature::CurvatureError;
use crate::expr::EvalError;

pub use checks::{
    check_closed, check_geodesic, concircular_check, killing_branch, torse_decompose, weyl_electric_check, ChenPoint,
    KillingBranch, SolitonPoint, SolitonReport, TorseFormingData, WeylElectric,
};
pub use fluid::{fluid_decompose, FluidDecomposition, FluidError, DEFAULT_CLUSTER_TOL};
pub use frame::{scalar_fields_at, FluidFrame, Perturbation, ScalarFields};
pub use ladder::{identity_ladder, IdentityLadderReport, LadderEntry, IDENTITIES};
pub use potential::{reconstruct_potential, Potential, Quadrature};

#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error(transparent)]
    Curvature(#[from] CurvatureError),
    #[error(transparent)]
    Fluid(#[from] FluidError),
    #[error("field is not closed (scale-free curl {residual:e})")]
    NotClosed { residual: f64 },
    #[error("quadrature did not converge with {panels} panels (last change {last_change:e})")]
    Quadrature { panels: usize, last_change: f64 },
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}

impl From<EvalError> for ClassifyError {
    fn from(e: EvalError) -> Self {
        Self::Curvature(e.into())
    }
}

impl From<ChartError> for ClassifyError {
    fn from(e: ChartError) -> Self {
        Self::Curvature(e.into())
    }
}
