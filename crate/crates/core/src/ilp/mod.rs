//! The discretized integer program bounding the expected number of caps a
//! random tetrahedron rotation leaves dark, its exact solution, and the
//! certificate derived from it.

mod certify;
mod model;
mod solve;

use thiserror::Error;

use crate::exact::ExactError;

pub use certify::{certify, CertificateReport};
pub use model::{
    audit_rounding, build_model, build_model_with, lune_area_expr, objective_expr, objective_piece, theta_cover_expr,
    theta_tangent_expr, weight_expr, ConstraintForm, IlpModel, ObjectivePiece, RoundingAudit, BIGCAP_CAPACITY,
};
pub use solve::{build_float_model, solve_exact, solve_float, FloatModel, IlpSolution, ProofMode, FLOAT_WEIGHT_GRID};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IlpError {
    #[error(transparent)]
    Rounding(#[from] ExactError),
    #[error("t and D must both be at least 1")]
    InvalidParameters,
    #[error("coefficient not on the 1/D grid: {0}")]
    OffGrid(String),
    #[error("unbounded program: item {index} has zero weight and positive value")]
    Unbounded { index: usize },
    #[error("model has no feasible point")]
    InfeasibleModel,
    #[error("verification failed: {0}")]
    VerificationFailed(String),
}
