//! Error type shared by every module.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Input outside the mathematical domain of an operation
    /// (negative radius, non-finite value, wrong dimension, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A grid or field failed a structural precondition.
    #[error("grid error: {0}")]
    Grid(String),

    /// Config validation failure; lists every offending field.
    #[error("invalid config: {}", .0.join("; "))]
    Config(Vec<String>),

    /// A quadrature could not reach the requested tolerance.
    #[error("quadrature tolerance not reached: requested {requested:.3e}, achieved {achieved:.3e}")]
    Accuracy { requested: f64, achieved: f64 },

    /// The time stepper produced a non-finite value.
    #[error("blow-up or instability at t = {time}: {message}")]
    Instability { time: f64, message: String },

    /// A state that must be real carries too large an imaginary part.
    #[error("integrity violation: {0}")]
    Integrity(String),

    /// Picard iteration left the contraction regime.
    #[error("Duhamel iteration is not contracting (difference ratio {ratio:.3})")]
    NonContraction { ratio: f64 },

    /// Regression input insufficient or rank-deficient.
    #[error("regression error: {0}")]
    Regression(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn grid(msg: impl Into<String>) -> Self {
        Error::Grid(msg.into())
    }
}
