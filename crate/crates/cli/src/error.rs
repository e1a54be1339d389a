use std::path::Path;

use thiserror::Error;

/// Failures of a command, each mapped to a stable exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("file not found: {path}")]
    NotFound { path: String },

    #[error("parse error in {path}: {reason}")]
    Parse { path: String, reason: String },

    #[error("validation failed: {0}")]
    Validation(replicax_core::Error),

    #[error("{diverged} of {total} replications diverged in `{experiment}` (outputs written to {dir})")]
    Divergence {
        experiment: String,
        diverged: usize,
        total: usize,
        dir: String,
    },

    #[error("{0}")]
    Io(replicax_core::Error),
}

impl CliError {
    /// 0 success, 1 usage or parse, 2 validation, 3 divergence, 4 output I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::NotFound { .. } | CliError::Parse { .. } => 1,
            CliError::Validation(_) => 2,
            CliError::Divergence { .. } => 3,
            CliError::Io(_) => 4,
        }
    }

    pub(crate) fn read(path: &Path, e: std::io::Error) -> Self {
        if e.kind() == std::io::ErrorKind::NotFound {
            CliError::NotFound {
                path: path.display().to_string(),
            }
        } else {
            CliError::Parse {
                path: path.display().to_string(),
                reason: e.to_string(),
            }
        }
    }
}

impl From<replicax_core::Error> for CliError {
    fn from(e: replicax_core::Error) -> Self {
        match e {
            replicax_core::Error::Io { .. } => CliError::Io(e),
            other => CliError::Validation(other),
        }
    }
}
