use std::fmt::Display;
use std::path::{Path, PathBuf};

use thiserror::Error;

/// Failures of a command, each mapped onto a stable process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags or configuration, detected before any work starts.
    #[error("invalid configuration: {0}")]
    Validation(String),
    /// Inputs or upstream artifacts that cannot be used.
    #[error("{0}")]
    Data(String),
    #[error("missing artifact {path}; run `mtese {step}` first")]
    MissingArtifact { path: PathBuf, step: &'static str },
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Data(_) | CliError::MissingArtifact { .. } => 2,
            CliError::Internal(_) => 3,
        }
    }

    pub fn data(context: impl Display, e: impl Display) -> Self {
        CliError::Data(format!("{context}: {e}"))
    }

    pub fn internal(context: impl Display, e: impl Display) -> Self {
        CliError::Internal(format!("{context}: {e}"))
    }

    pub fn write(path: &Path, e: impl Display) -> Self {
        CliError::Internal(format!("writing {}: {e}", path.display()))
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
