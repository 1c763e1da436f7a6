use std::path::PathBuf;

use quantum_reading::ReadingError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Domain(#[from] ReadingError),

    #[error("cannot write {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("oracle check failed: {0}")]
    OracleFailure(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Domain(_) => 2,
            CliError::Io { .. } => 3,
            CliError::OracleFailure(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
