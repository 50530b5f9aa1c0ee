use thiserror::Error;

/// Errors raised by state construction, geometry and verification routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("invalid dimension {0}: must be at least 1")]
    InvalidDimension(usize),

    #[error("vector has a non-finite component at index {0}")]
    NonFinite(usize),

    #[error("zero vector has no ray")]
    ZeroVector,

    #[error("vector norm {0} is not within tolerance of 1")]
    NotUnit(f64),

    #[error("requested {count} orthonormal vectors in dimension {dim}")]
    CountExceedsDim { count: usize, dim: usize },

    #[error("sequence length {length} exceeds dimension {dim}")]
    LengthExceedsDim { length: usize, dim: usize },

    #[error("states are orthogonal; phase factor undefined")]
    OrthogonalStates,

    #[error("states coincide as rays")]
    EqualStates,

    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error(
        "eigensolver did not converge after {sweeps} sweeps (off-diagonal residual {residual:e})"
    )]
    ConvergenceFailure { sweeps: usize, residual: f64 },

    #[error("probe family is empty")]
    EmptyProbes,

    #[error("tail {tail} must be positive and shorter than the sequence length {length}")]
    TailTooLong { tail: usize, length: usize },

    #[error("sequence is not Cauchy in trace distance: tail residual {residual:e} >= {tol:e}")]
    NotCauchy { residual: f64, tol: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("universe points {0} and {1} lie on the same ray")]
    DuplicatePoint(usize, usize),

    #[error("generator set references id {id} outside universe of size {size}")]
    IdOutOfRange { id: usize, size: usize },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
