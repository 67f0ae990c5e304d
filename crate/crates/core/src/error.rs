use thiserror::Error;

/// Errors produced by the capacity toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not Hermitian (max |M - M^dagger| = {0:e})")]
    NotHermitian(f64),

    #[error("trace is not 1 (got {0})")]
    InvalidTrace(f64),

    #[error("not positive semidefinite (min eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("eigendecomposition failed: {0}")]
    Eigen(String),

    #[error("subsystem index {index} out of range for {count} subsystems")]
    SubsystemIndex { index: usize, count: usize },

    #[error("Kraus completeness violated: ||sum K^dagger K - I||_F = {residual:e}")]
    Completeness { residual: f64 },

    #[error("parameter `{name}` = {value} outside [0, 1]")]
    Parameter { name: String, value: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid ensemble: {0}")]
    Ensemble(String),

    #[error("optimizer did not converge (best value {value})")]
    NotConverged { value: f64 },

    #[error("invalid channel spec: {0}")]
    ChannelSpec(String),
}

pub type Result<T> = std::result::Result<T, Error>;
