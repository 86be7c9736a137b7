use thiserror::Error;

/// Failure modes shared by every numerical routine in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function (gamma pole, t <= 0, ...).
    #[error("domain error: {0}")]
    Domain(String),
    /// A hypothesis required by an identity or routine does not hold.
    #[error("precondition failed: {0}")]
    Precondition(String),
    /// Overflow, NaN or a numerically singular solve.
    #[error("numeric failure: {0}")]
    Numeric(String),
    /// Quadrature or series refinement did not settle within tolerance.
    #[error("accuracy not reached: {0}")]
    Accuracy(String),
    /// The Schur/eigen solver did not converge.
    #[error("eigensolver failure: {0}")]
    Eigen(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
