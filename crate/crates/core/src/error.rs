use thiserror::Error;

/// Errors raised by the algebraic layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{s} is not below {t}")]
    NotLeq { s: String, t: String },
    #[error("unsupported truncation: {0}")]
    UnsupportedTruncation(String),
    #[error("invalid monoid element: {0}")]
    InvalidElement(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("dense factors require dimension 1 (factor {factor})")]
    DenseDimension { factor: usize },
    #[error("label does not match grade: {0}")]
    LabelMismatch(String),
    #[error("invalid product system: {0}")]
    InvalidSystem(String),
    #[error("operator is not compact: {0}")]
    NotCompact(String),
    #[error("grade {0} lies outside the truncation")]
    OutsideTruncation(String),
    #[error("search exhausted: {0}")]
    SearchExhausted(String),
}

pub type Result<T> = std::result::Result<T, Error>;
