use thiserror::Error;

/// Failure modes shared by every module.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument is outside the documented domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// The requested computation would exceed a sweep, enumeration or memory budget.
    #[error("resource limit: {0}")]
    Resource(String),
    /// Two independent evaluation routes disagree by more than their tolerances allow.
    #[error("internal consistency check failed: {0}")]
    Consistency(String),
    /// A statistic was requested on fewer samples than it needs.
    #[error("undersampled: need at least {needed} points, got {got}")]
    Undersampled { needed: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
