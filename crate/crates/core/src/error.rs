use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum FrameError {
    #[error("coherence undefined for a single vector")]
    SingleVector,

    #[error("column {0} is exactly zero and cannot be normalized")]
    ZeroColumn(usize),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("bound undefined: {0}")]
    BoundUndefined(String),

    #[error("polynomial {poly:#x} is reducible over GF(2): divisible by {factor:#x}")]
    ReduciblePolynomial { poly: u64, factor: u64 },

    #[error("size guard exceeded: {what} requires {required}, allowed {allowed}")]
    GuardExceeded {
        what: &'static str,
        required: u64,
        allowed: u64,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl FrameError {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        FrameError::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        FrameError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = FrameError> = std::result::Result<T, E>;
