use thiserror::Error;

/// Errors surfaced by exact and truncated p-adic computations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("precision exhausted: fewer than one significant digit remains")]
    PrecisionExhausted,
    #[error("valuation is not exactly known at the stored precision")]
    AmbiguousValuation,
    #[error("undecidable at the stored precision")]
    Undecidable,
    #[error("value is not a critical point: {0}")]
    NotACriticalPoint(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
