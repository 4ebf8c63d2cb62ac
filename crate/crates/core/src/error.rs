use thiserror::Error;

pub type Result<T, E = WarpError> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WarpError {
    /// A coordinate lies outside the base or fiber it was evaluated on.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The hypothesis of a closed-form identity does not hold for the given space.
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("no convergence: {0}")]
    NonConvergence(String),

    #[error("memory guard: {0}")]
    MemoryGuard(String),

    #[error("schema error: {0}")]
    Schema(String),
}

impl WarpError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        WarpError::InvalidInput(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        WarpError::Domain(msg.into())
    }

    /// Numerical guards (memory, convergence) are distinguished from bad input
    /// so the command line can map them onto different exit codes.
    pub fn is_numerical_guard(&self) -> bool {
        matches!(self, WarpError::NonConvergence(_) | WarpError::MemoryGuard(_))
    }
}

impl From<serde_json::Error> for WarpError {
    fn from(e: serde_json::Error) -> Self {
        WarpError::Schema(e.to_string())
    }
}
