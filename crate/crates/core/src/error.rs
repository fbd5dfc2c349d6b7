use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the laboratory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("validation error: {0}")]
    Validation(String),

    #[error("dimension mismatch: left graph has {left} vertices, right graph has {right}")]
    Dimension { left: usize, right: usize },

    #[error("unsupported hyperedge arity {0} (supported: 2, 3)")]
    UnsupportedArity(usize),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("target {target} is out of range: {reason}")]
    OutOfRange { target: f64, reason: String },

    #[error("planning error at c = {c}: {reason}")]
    Planning { c: f64, reason: String },

    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("sweep aborted after {completed} trials: {reason}")]
    SweepAborted { completed: usize, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
