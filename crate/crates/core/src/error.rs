//! Error type shared by every module of the crate.

use thiserror::Error;

/// Failure modes of the numerical routines.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum MbError {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A gamma-function argument hit a pole.
    #[error("pole: {0}")]
    Pole(String),
    /// A determinant or linear system is too ill-conditioned to trust.
    #[error("conditioning error: {0}")]
    Conditioning(String),
    /// An iterative or adaptive procedure did not converge.
    #[error("convergence error: {0}")]
    Convergence(String),
    /// An internal cross-check failed.
    #[error("internal consistency error: {0}")]
    Consistency(String),
    /// The MCMC step size could not be tuned.
    #[error("tuning error: {0}")]
    Tuning(String),
}

impl MbError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        MbError::Domain(msg.into())
    }
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, MbError>;
