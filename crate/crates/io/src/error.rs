use std::path::{Path, PathBuf};

use thiserror::Error;

/// Failure while decoding a byte buffer, with the byte offset where it was noticed.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("byte {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(offset: usize, message: impl Into<String>) -> Self {
        Self {
            offset,
            message: message.into(),
        }
    }
}

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Parse { path: PathBuf, source: ParseError },
    #[error("{}: {message}", path.display())]
    Unsupported { path: PathBuf, message: String },
    #[error("{}: {source}", path.display())]
    Invalid {
        path: PathBuf,
        source: splatfuse_core::Error,
    },
    #[error("{}: {source}", path.display())]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("{}: {source}", path.display())]
    Image {
        path: PathBuf,
        source: image::ImageError,
    },
}

impl IoError {
    pub fn path(&self) -> &Path {
        match self {
            IoError::Io { path, .. }
            | IoError::Parse { path, .. }
            | IoError::Unsupported { path, .. }
            | IoError::Invalid { path, .. }
            | IoError::Json { path, .. }
            | IoError::Image { path, .. } => path,
        }
    }

    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        IoError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub(crate) fn parse(path: &Path, source: ParseError) -> Self {
        IoError::Parse {
            path: path.to_path_buf(),
            source,
        }
    }

    pub(crate) fn unsupported(path: &Path, message: impl Into<String>) -> Self {
        IoError::Unsupported {
            path: path.to_path_buf(),
            message: message.into(),
        }
    }

    pub(crate) fn invalid(path: &Path, source: splatfuse_core::Error) -> Self {
        IoError::Invalid {
            path: path.to_path_buf(),
            source,
        }
    }
}

pub type Result<T, E = IoError> = std::result::Result<T, E>;
