use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid twist setup: {0}")]
    InvalidSetup(String),
    #[error("window insufficient: {0}")]
    WindowInsufficient(String),
    #[error("out of quadratic sector: {0}")]
    OutOfSector(String),
    #[error("limit not divisible by x0^{k}: nonzero coefficient at x0^{exponent}")]
    Divisibility { k: u32, exponent: i64 },
    #[error("linear solve failed: {0}")]
    SolveFailure(String),
    #[error("mixed orders: {0}")]
    MixedOrder(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
