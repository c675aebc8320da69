use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("dimension mismatch: expected {expected} values, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("grid of {points} points exceeds the configured cap of {cap}")]
    ResourceLimit { points: usize, cap: usize },

    #[error("{samples} samples per axis under-resolve half-width {half_width} (need at least {needed})")]
    Aliasing {
        samples: usize,
        half_width: usize,
        needed: usize,
    },

    #[error("integer overflow: {0}")]
    Overflow(String),

    #[error("work budget exceeded: {work} operations > {budget}")]
    BudgetExceeded { work: u128, budget: u128 },

    #[error("evolution aborted at t = {time}: {reason}")]
    BlowUp { time: f64, reason: String },

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
