use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum FockError {
    #[error("letter {letter} is outside the alphabet 1..={n}")]
    InvalidLetter { letter: usize, n: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("basis of size {size} exceeds the configured cap {cap}")]
    BasisTooLarge { size: u128, cap: usize },

    #[error("symbol of degree {degree} does not fit truncation level {level}")]
    DegreeOverflow { degree: usize, level: usize },

    #[error("constant term {0:e} is too close to zero to invert")]
    ZeroConstantTerm(f64),

    #[error("singular point: {0}")]
    Singularity(String),

    #[error("operator is not a contraction (compression norm {0})")]
    NotContraction(f64),

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("request leaves the exact region: {0}")]
    OutsideExactRegion(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, FockError>;
