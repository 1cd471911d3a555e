use thiserror::Error;

/// Errors surfaced by the library.
///
/// `MathInconsistency` is deliberately loud: it means an internal invariant
/// that is a theorem (duality, obstruction consistency, coefficient
/// vanishing) failed on computed data, which indicates a deficient
/// generating pool or an insufficient elimination bound rather than bad
/// user input.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported level {0}: no seed recipe registered")]
    UnsupportedLevel(u64),

    #[error("invalid genus symbol: {0}")]
    InvalidGenusSymbol(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("insufficient truncation order: need at least {needed}, have {got}")]
    InsufficientOrder { needed: i64, got: i64 },

    #[error("integrality violation at exponent {n}: s(n)c(n) = {value} is not an integer")]
    IntegralityViolation { n: i64, value: String },

    #[error("mathematical inconsistency detected: {0}")]
    MathInconsistency(String),

    #[error("no solution: {0}")]
    NoSolution(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
