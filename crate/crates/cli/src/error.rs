use std::io;
use std::path::PathBuf;

use thiserror::Error;
use thui_core::dataset::DatasetError;
use thui_core::query::QueryError;
use thui_core::tree::BuildError;

/// Process exit statuses.
pub mod exit {
    pub const OK: i32 = 0;
    pub const IO: i32 = 2;
    pub const USAGE: i32 = 64;
    pub const INTEGRITY: i32 = 70;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}: {source}", path.display())]
    Parse { path: PathBuf, source: DatasetError },
    #[error("output error: {0}")]
    Output(#[from] io::Error),
    #[error("{0}")]
    Usage(String),
    #[error("internal integrity failure: {0}")]
    Integrity(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } | CliError::Parse { .. } | CliError::Output(_) => exit::IO,
            CliError::Usage(_) => exit::USAGE,
            CliError::Integrity(_) => exit::INTEGRITY,
        }
    }
}

impl From<QueryError> for CliError {
    fn from(e: QueryError) -> Self {
        match e {
            QueryError::OrderMismatch => CliError::Integrity(e.to_string()),
            QueryError::EmptyTarget | QueryError::BadStrategyMask(_) => CliError::Usage(e.to_string()),
        }
    }
}

impl From<BuildError> for CliError {
    fn from(e: BuildError) -> Self {
        CliError::Integrity(e.to_string())
    }
}
