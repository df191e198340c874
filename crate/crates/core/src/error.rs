use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A probability object or parameter failed validation.
    #[error("validation error: {0}")]
    Validation(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// Caller supplied inconsistent arguments (e.g. overlapping axis sets).
    #[error("usage error: {0}")]
    Usage(String),

    /// A closed form left its domain of validity.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("numerical error: {message} (achieved {achieved:e})")]
    Numerical { message: String, achieved: f64 },

    /// The requested computation exceeds an enumeration or size budget.
    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("construction error: {0}")]
    Construction(String),
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn dims(msg: impl Into<String>) -> Self {
        Error::DimensionMismatch(msg.into())
    }

    /// True when the error is a refusal on size grounds rather than bad input.
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::Budget(_))
    }
}
