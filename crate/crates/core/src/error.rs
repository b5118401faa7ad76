use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("capacity exceeded: {needed} terms needed, cap is {cap}")]
    Capacity { needed: u64, cap: u64 },
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("wrong point class: {0}")]
    Class(String),
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("outside validity radius: {0}")]
    Validity(String),
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("degenerate probe: {0}")]
    Degenerate(String),
    #[error("out of range: {0}")]
    Range(String),
    #[error("insufficient resolution: {0}")]
    Resolution(String),
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, Error>;
