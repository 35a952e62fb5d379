use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid covariance spec: {0}")]
    InvalidSpec(String),

    #[error("invalid spiked parameters: {0}")]
    InvalidSpiked(String),

    #[error("basis is not orthonormal: max |QᵀQ - I| = {0:.3e}")]
    NotOrthonormal(f64),

    #[error("matrix is not symmetric: max |A - Aᵀ| = {0:.3e}")]
    NotSymmetric(f64),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off:.3e})")]
    EigenNoConvergence { sweeps: usize, off: f64 },

    #[error("eigendecomposition failed: {0}")]
    EigenFailed(String),

    #[error("slice radius alpha = {0} outside [0, 1]")]
    AlphaOutOfRange(f64),

    #[error("invalid width problem: {0}")]
    InvalidWidthProblem(String),

    #[error("dual solver did not converge: {0}")]
    DualNoConvergence(String),

    #[error("grid oracle supports at most 3 eigenvalue groups, got {0}")]
    OracleTooManyGroups(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
