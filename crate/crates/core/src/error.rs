use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The Levinson recursion produced a non-positive innovation variance.
    #[error("correlation matrix is not positive definite (innovation variance {variance:e} at order {order})")]
    NotPositiveDefinite { order: usize, variance: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    /// A circulant eigenvalue was negative beyond round-off.
    #[error("circulant embedding failed: eigenvalue {eigenvalue:e} at index {index}")]
    EmbeddingFailure { index: usize, eigenvalue: f64 },

    #[error("distance is not strictly monotone on the {side} branch at parameter {at}")]
    NonMonotoneDistance { side: &'static str, at: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite log posterior at internal coordinate {internal}, log-precision {kappa}")]
    QuadratureNonFinite { internal: f64, kappa: f64 },

    #[error("compared models do not share priors: {0}")]
    MismatchedPriors(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
