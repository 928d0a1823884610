use thiserror::Error;

/// Errors produced by the numerical kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),
    /// The quantity is singular at the requested point.
    #[error("singularity: {0}")]
    Singularity(String),
    /// A cone or profile violates its geometric invariants.
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    /// The operation is not available for this representation.
    #[error("unsupported: {0}")]
    Unsupported(String),
    /// The request would exceed a fixed resource bound.
    #[error("resource limit: {0}")]
    Resource(String),
    /// Invalid numerical configuration (node counts, tolerances, ranges).
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Returns the error unless `$cond` holds. NaN comparisons are false, so
/// they fail.
macro_rules! ensure {
    ($cond:expr, $variant:ident, $($arg:tt)+) => {
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !$cond {
            return Err($crate::error::Error::$variant(format!($($arg)+)));
        }
    };
}
pub(crate) use ensure;
