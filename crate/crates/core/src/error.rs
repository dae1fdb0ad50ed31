use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid domain field `{field}`: {reason}")]
    Validation { field: &'static str, reason: String },

    #[error("domain has no active nodes")]
    EmptyDomain,

    #[error("operands live on different domains")]
    DomainMismatch,

    #[error("invalid boundary condition for {kind}: {reason}")]
    InvalidBoundary { kind: &'static str, reason: String },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("function is not finite at mode {k} (radical {radical})")]
    NonFiniteEvaluation { k: usize, radical: f64 },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("fit window too small or degenerate: {0}")]
    FitWindow(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("field is identically zero")]
    ZeroField,

    #[error("domain too small: {0}")]
    TooSmall(String),

    #[error("eigensolver failed to converge after {0} iterations")]
    NoConvergence(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
