use thiserror::Error;

/// Errors raised by the library surface.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter lies outside the domain of the operation.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The operation is only defined when a theorem's hypothesis holds.
    #[error("{citation} precondition: {detail}")]
    Precondition {
        citation: &'static str,
        detail: String,
    },

    /// A kernel element exceeded the term budget.
    #[error("kernel element has {len} terms, cap is {cap}")]
    TooManyTerms { len: usize, cap: usize },

    /// Floating point breakdown (non-finite values, indefinite Gram
    /// matrix, quadrature or eigen-iteration non-convergence).
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
