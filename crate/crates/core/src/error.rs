use thiserror::Error;

use crate::integrate::IntegrationResult;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Invalid structure, norm or run configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// The quadrature ran out of function evaluations before reaching its tolerance.
    #[error("evaluation budget of {budget} exceeded (partial value {}, error estimate {})", partial.value, partial.abs_error_estimate)]
    BudgetExceeded {
        budget: usize,
        partial: IntegrationResult,
    },

    /// The integrand misbehaved (non-finite values).
    #[error("integrand error: {0}")]
    Integrand(String),

    /// The function has (numerically) zero mass.
    #[error("degenerate function: {0}")]
    Degenerate(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
