use thiserror::Error;

/// Errors raised by the bound, coefficient, statistic and simulation layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain where a formula is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// Input data violates a structural invariant (empty, unsorted, mismatched, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The bound is vacuous because the product of coefficients does not exceed one.
    #[error("bound inapplicable: coefficient product {product} must exceed 1")]
    Inapplicable { product: f64 },

    /// A numerical search failed to bracket or locate its target.
    #[error("convergence failure: {0}")]
    Convergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
