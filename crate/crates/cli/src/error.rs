use std::path::PathBuf;

use ringsim_core::RingError;
use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_AUDIT: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {location}field `{field}`: {message}")]
    Config { field: String, location: String, message: String },

    #[error("config error: {path}:{line}:{column}: {message}")]
    Syntax { path: PathBuf, line: usize, column: usize, message: String },

    #[error("config error: {0}")]
    Model(#[from] RingError),

    #[error("I/O error: {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("identity audit failed: {0}")]
    AuditFailed(String),
}

impl CliError {
    pub fn field(field: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Config { field: field.into(), location: String::new(), message: message.into() }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } | CliError::Syntax { .. } | CliError::Model(_) => EXIT_CONFIG,
            CliError::Io { .. } => EXIT_IO,
            CliError::AuditFailed(_) => EXIT_AUDIT,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
