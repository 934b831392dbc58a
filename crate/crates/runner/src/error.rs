use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("config syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },

    #[error("config error at `{key}`: {message}")]
    Schema { key: String, message: String },

    #[error("invalid `{key}`: {message}")]
    Invalid { key: String, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv output failed: {0}")]
    Csv(#[from] csv::Error),

    /// A library contract fired while the scenario was running.
    #[error(transparent)]
    Contract(#[from] b4nl::Error),
}

impl RunError {
    pub fn invalid(key: &str, message: impl Into<String>) -> Self {
        RunError::Invalid { key: key.to_string(), message: message.into() }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        RunError::Io { path: path.into(), source }
    }

    /// Process exit status: 1 for a fired contract, 2 for config or I/O trouble.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Contract(_) => 1,
            _ => 2,
        }
    }

    /// Short machine-readable category for the manifest.
    pub fn category(&self) -> &'static str {
        match self {
            RunError::Syntax { .. } | RunError::Schema { .. } | RunError::Invalid { .. } => "config",
            RunError::Io { .. } | RunError::Csv(_) => "io",
            RunError::Contract(_) => "contract",
        }
    }
}

pub type RunResult<T> = std::result::Result<T, RunError>;
