use std::io;

use thiserror::Error;

/// Errors raised by the simulator and its detectors.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("degenerate accelerometer sample at t={timestamp}")]
    DegenerateSample { timestamp: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("protocol violation: {0}")]
    ProtocolViolation(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    /// Process exit code used by the CLI for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidScenario(_) | Error::Config(_) => 2,
            Error::Format(_) => 3,
            Error::ProtocolViolation(_) => 4,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
