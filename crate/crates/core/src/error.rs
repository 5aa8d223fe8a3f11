use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("element is not invertible (norm 0); the algebra is not a division algebra here")]
    NotInvertible,

    #[error("quaternion algebra has no involution")]
    MissingInvolution,

    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),

    #[error("polynomial is not squarefree")]
    NotSquarefree,

    #[error("{0} is a perfect square")]
    PerfectSquare(u64),

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("form is not definite: {0}")]
    NotDefinite(String),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("invalid level: {0}")]
    InvalidLevel(String),

    #[error("point set is not closed under the symmetry group: {0}")]
    ClosureViolation(String),

    #[error("candidate cap exceeded: {0}")]
    CandidateCap(String),

    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    #[error("inconsistent input: {0}")]
    Inconsistent(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("fit error: {0}")]
    Fit(String),
}
