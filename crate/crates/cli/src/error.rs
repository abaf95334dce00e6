use std::path::PathBuf;

use thiserror::Error;

/// Failures split by exit code: configuration problems exit 1, anything
/// that goes wrong afterwards exits 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error in `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("cannot read config {}: {reason}", path.display())]
    ConfigFile { path: PathBuf, reason: String },

    #[error(transparent)]
    Runtime(#[from] anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } | CliError::ConfigFile { .. } => 1,
            CliError::Runtime(_) => 2,
        }
    }
}

impl From<spinaddr::Error> for CliError {
    fn from(e: spinaddr::Error) -> Self {
        CliError::Runtime(e.into())
    }
}
