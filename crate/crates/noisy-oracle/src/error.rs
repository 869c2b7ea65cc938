use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum RunError {
    /// Bad configuration or parameters; exit code 2.
    #[error("invalid configuration: {0}")]
    Config(String),
    /// The result file could not be written; exit code 2.
    #[error("cannot write {}: {source}", path.display())]
    Output {
        path: PathBuf,
        source: std::io::Error,
    },
    /// A check inside the simulation failed; exit code 1.
    #[error("internal error: {0}")]
    Internal(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) | RunError::Output { .. } => 2,
            RunError::Internal(_) => 1,
        }
    }
}

impl From<noisy_oracle_core::Error> for RunError {
    fn from(e: noisy_oracle_core::Error) -> Self {
        match e {
            noisy_oracle_core::Error::OutOfRange { name, reason } => RunError::Config(format!("{name}: {reason}")),
            other => RunError::Internal(other.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, RunError>;
