use thiserror::Error;

/// Errors raised by state construction, reduction, and the entanglement measure.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("state has no nonzero amplitude")]
    EmptyState,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("factor extraction failed: {0}")]
    FactorExtractionFailure(String),
    #[error("classification unstable for pattern {pattern}: {detail}")]
    ClassificationUnstable { pattern: String, detail: String },
    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
