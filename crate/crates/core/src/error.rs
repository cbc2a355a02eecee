use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("q must be a prime power (got {0})")]
    NotPrimePower(u64),
    #[error("instance too large: {0}")]
    TooLarge(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("enumeration budget exceeded: {needed} items against a cap of {cap}")]
    BudgetExceeded { needed: String, cap: u64 },
    #[error("empty input")]
    EmptyInput,
    #[error("duplicate points in input")]
    DuplicatePoints,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("intersection profile is missing required entries: {0}")]
    MissingProfile(String),
    #[error("theta must lie in [0, 1] (got {0})")]
    InvalidTheta(f64),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    /// True for errors caused by an instance that is well-formed but too big
    /// to enumerate or simulate.
    pub fn is_infeasible(&self) -> bool {
        matches!(self, Error::TooLarge(_) | Error::BudgetExceeded { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParams(msg.into())
}
