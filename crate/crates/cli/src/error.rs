use std::path::PathBuf;

use splatfuse_core::Error as CoreError;
use splatfuse_io::IoError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("{}: {source}", path.display())]
    Fs {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Compute(String),
}

impl CliError {
    /// 0 success, 1 computation failure, 2 usage or I/O problem. Inputs whose
    /// sizes disagree count as an input problem.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) | CliError::Fs { .. } => 2,
            CliError::Core(CoreError::DimensionMismatch { .. }) => 2,
            CliError::Core(_) | CliError::Compute(_) => 1,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
