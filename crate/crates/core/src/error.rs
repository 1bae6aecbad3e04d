use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the toolkit's library layer.
#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("schema error: {0}")]
    Schema(String),
    #[error("row {row}: {message}")]
    Row { row: usize, message: String },
    #[error("integrity error: {0}")]
    Integrity(String),
    #[error("stratification error: {0}")]
    Stratification(String),
    #[error("ingestion error: {0}")]
    Ingestion(String),
    #[error("format error at line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("undefined: {0}")]
    Undefined(String),
    #[error("leakage detected: {0}")]
    Leakage(String),
    #[error("model format error: {0}")]
    ModelFormat(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Errors that indicate a broken internal invariant rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::Leakage(_) | Error::Contract(_))
    }
}
