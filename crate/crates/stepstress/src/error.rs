use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter or configuration value is outside its domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Input data violates a structural requirement (ordering, counts, ...).
    #[error("invalid data: {0}")]
    InvalidData(String),

    /// Data carries no usable failures (e.g. censoring removed everything).
    #[error("degenerate data: {0}")]
    DegenerateData(String),

    /// An iterative numeric procedure failed (no bracket, singular matrix, ...).
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// A weighted posterior sample is too degenerate to summarize reliably.
    #[error("effective sample size too low ({ess:.2}); {context}")]
    LowEss { ess: f64, context: String },
}

pub type Result<T> = std::result::Result<T, Error>;
