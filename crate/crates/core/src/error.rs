use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Grid too small or malformed.
    #[error("grid error: {0}")]
    Grid(String),

    /// Invalid configuration; `key` names the offending config entry.
    #[error("config error at `{key}`: {message}")]
    Config { key: String, message: String },

    /// A non-finite value appeared while time stepping.
    #[error("numerical instability at step {step} (t = {time})")]
    Instability { step: usize, time: f64 },

    /// Least-squares fit could not be performed.
    #[error("fit error: {0}")]
    Fit(String),

    /// Trajectory diagnostics could not be computed.
    #[error("diagnostics error: {0}")]
    Diagnostics(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
