use thiserror::Error;

/// Errors produced by tensor construction, I/O and the solvers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum TcpError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("tensor order must be at least 2, got {0}")]
    InvalidOrder(usize),

    #[error("tensor dimension must be at least 1")]
    InvalidDimension,

    #[error("non-finite value at position {0}")]
    NonFinite(usize),

    #[error("tensor is flagged symmetric but entries are not permutation invariant")]
    NotSymmetric,

    #[error("invalid norm exponent {0}: must be > 1 or infinite")]
    InvalidNorm(f64),

    #[error("malformed document: {0}")]
    Malformed(String),

    #[error("index {idx:?} out of range for dimension {dim}")]
    IndexOutOfRange { idx: Vec<usize>, dim: usize },

    #[error("duplicate entry for index {0:?}")]
    DuplicateIndex(Vec<usize>),

    #[error("vector must be nonzero")]
    ZeroVector,

    #[error("invalid S-witness: {0}")]
    InvalidWitness(String),

    #[error("dimension {n} exceeds the enumeration limit {max}")]
    TooLarge { n: usize, max: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, TcpError>;
