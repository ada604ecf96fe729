use std::fmt;

/// Crate-wide error type.
///
/// Numerical routines distinguish *domain* errors (the caller asked for a
/// value outside the mathematical domain — recoverable by fixing the input)
/// from *numerics* errors (an iteration failed to converge at the requested
/// tolerance — the result would be silently wrong if returned).
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Input outside the mathematical domain of the operation.
    #[error("domain error in {op}: {msg}")]
    Domain { op: &'static str, msg: String },

    /// Mismatched dimensions between arguments.
    #[error("dimension mismatch in {op}: {msg}")]
    Dimension { op: &'static str, msg: String },

    /// An iterative method failed to reach its tolerance.
    #[error("numerical failure in {op}: {msg}")]
    Numerics { op: &'static str, msg: String },

    /// Invalid experiment or run configuration.
    #[error("config error: {0}")]
    Config(String),

    /// Linear-program outcome that the caller treated as exceptional.
    #[error("linear program {op}: {msg}")]
    Lp { op: &'static str, msg: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn domain(op: &'static str, msg: impl fmt::Display) -> Self {
        Error::Domain { op, msg: msg.to_string() }
    }

    pub fn dimension(op: &'static str, msg: impl fmt::Display) -> Self {
        Error::Dimension { op, msg: msg.to_string() }
    }

    pub fn numerics(op: &'static str, msg: impl fmt::Display) -> Self {
        Error::Numerics { op, msg: msg.to_string() }
    }

    pub fn config(msg: impl fmt::Display) -> Self {
        Error::Config(msg.to_string())
    }

    pub fn lp(op: &'static str, msg: impl fmt::Display) -> Self {
        Error::Lp { op, msg: msg.to_string() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
