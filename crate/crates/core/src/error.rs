use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid dimension {0}: must be at least 1")]
    InvalidDimension(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("length mismatch: expected {expected} bits, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("infeasible code parameters: {0}")]
    InfeasibleParams(String),
    #[error("scale guard exceeded: {0}")]
    ScaleGuard(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("invalid POVM: {0}")]
    InvalidPovm(String),
    #[error("malformed data: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
