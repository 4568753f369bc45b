use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid function: {0}")]
    InvalidFunction(String),

    #[error("invalid kernel parameter: {0}")]
    InvalidKernel(String),

    #[error("kernel mass check failed: mass {mass} differs from 1 by more than {tol:e}")]
    MassCheck { mass: f64, tol: f64 },

    #[error("quadrature did not converge: achieved error {achieved:e}, requested {requested:e}")]
    Quadrature { achieved: f64, requested: f64 },

    #[error("scale must be positive, got {0}")]
    NonPositiveScale(f64),

    #[error("sup over scales not certified at x = {x}: best {best}, uncertified gap {gap:e}")]
    Uncertified { x: f64, best: f64, gap: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("threshold {delta:e} does not dominate certification error {err:e}")]
    ThresholdTooSmall { delta: f64, err: f64 },

    #[error("bisection bracket fails the sign condition at k = {k} on [{lo}, {hi}]")]
    Bracket { k: usize, lo: f64, hi: f64 },

    #[error("point {0} is not a sample of the profile grid")]
    OffGrid(f64),

    #[error("tail radius search exceeded {limit:e} (last tried {radius})")]
    TailRadius { radius: f64, limit: f64 },

    #[error("invalid sequence: {0}")]
    InvalidSequence(String),

    #[error("invalid configuration field `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
