use std::path::Path;

use thiserror::Error;

/// Failure of a command, carrying its process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),

    #[error("{path}: line {line}: {reason}")]
    Parse { path: String, line: usize, reason: String },

    #[error("{0}")]
    Unstable(String),

    #[error("{0}")]
    VerifyFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Parse { .. } => 3,
            CliError::Unstable(_) => 4,
            CliError::VerifyFailed(_) => 5,
        }
    }

    pub(crate) fn parse(path: &Path, line: usize, reason: impl Into<String>) -> Self {
        CliError::Parse {
            path: path.display().to_string(),
            line,
            reason: reason.into(),
        }
    }

    pub(crate) fn write(path: &Path, err: std::io::Error) -> Self {
        CliError::Validation(format!("cannot write {}: {err}", path.display()))
    }
}

impl From<moyal_core::Error> for CliError {
    fn from(e: moyal_core::Error) -> Self {
        match e {
            moyal_core::Error::UnstableStep { .. } | moyal_core::Error::UnitarityDrift(_) => {
                CliError::Unstable(e.to_string())
            }
            other => CliError::Validation(other.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
