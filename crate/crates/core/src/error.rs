use thiserror::Error;

/// Errors produced by grid, noise, estimator and demodulation operations.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violated a documented precondition.
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("grid mismatch: {left} vs {right} intervals")]
    GridMismatch { left: usize, right: usize },

    /// A kernel or signal produced NaN or infinity.
    #[error("non-finite value {value} at t = {t}")]
    NonFinite { t: f64, value: f64 },

    /// The window length sits inside the exclusion zone of a divisor zero.
    #[error("divisor {divisor:e} at t = {t} is below the zero threshold {epsilon:e}")]
    DivisorZero { t: f64, divisor: f64, epsilon: f64 },

    /// An estimator could not be built from the requested carrier.
    #[error("estimator construction failed: {0}")]
    Construction(String),

    /// A demodulation scenario or experiment is misconfigured.
    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn argument(msg: impl Into<String>) -> Error {
    Error::Argument(msg.into())
}
