use thiserror::Error;

/// Errors raised by the estimators, samplers and diagnostics.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Malformed input (length mismatch, unsorted sequence, negative draws).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The requested computation is not defined for this kind of input.
    #[error("unsupported input: {0}")]
    Unsupported(String),

    /// τ = 1/2 for the closed-form covariance: the cross term grows like log k.
    #[error("degenerate case: {0}")]
    Degenerate(String),

    /// A tail model whose perturbation makes `1 + p(u)` nonpositive.
    #[error("invalid model: {0}")]
    ModelValidity(String),

    #[error("insufficient data: need {needed} usable values, found {available}")]
    InsufficientData { needed: usize, available: usize },

    #[error("positivity violation: {count} of the top {window} values are <= 0")]
    Positivity { count: usize, window: usize },

    /// Data sitting on or above the declared upper endpoint.
    #[error("endpoint error: {0}")]
    Endpoint(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
