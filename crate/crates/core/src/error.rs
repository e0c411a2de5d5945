//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by model validation, codecs, and numerical solvers.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("row {row} is not a probability vector (residual {residual:.3e})")]
    NonStochastic { row: usize, residual: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("infeasible distortion {d}: feasible range [{lo}, {hi}]")]
    InfeasibleDistortion { d: f64, lo: f64, hi: f64 },
    #[error("duplicate interpolation positions")]
    DuplicatePositions,
    #[error("block length {n} exceeds field order {order}")]
    FieldTooSmall { n: usize, order: usize },
    #[error("payload header does not match field context: {0}")]
    HeaderMismatch(String),
    #[error("numerically singular system (condition number {kappa:.3e})")]
    SingularSystem { kappa: f64 },
    #[error("solver did not converge after {iterations} iterations (residual {residual:.3e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("quadrature did not reach requested tolerance (achieved {achieved:.3e})")]
    QuadratureFailure { achieved: f64 },
    #[error("search budget exceeded: {0} candidates")]
    SearchBudgetExceeded(u64),
}

pub type Result<T> = std::result::Result<T, Error>;
