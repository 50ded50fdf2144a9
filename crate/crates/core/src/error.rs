//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by spectrogram construction, cost assembly, solving and I/O.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violates a documented precondition (bad index, bad size, ...).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The requested operation is undefined for this input (zero mass, negative
    /// frequency, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Two supports that must share an axis do not.
    #[error("axis mismatch: {0}")]
    AxisMismatch(String),

    /// A structured cost build left a source row or target column without any
    /// finite entry, which would make the transport problem degenerate.
    #[error("degenerate cost pattern: empty {kind} {index} (1-based)")]
    EmptyPattern { kind: &'static str, index: usize },

    /// A dense build would exceed the configured entry cap.
    #[error("resource limit: {0}")]
    ResourceLimit(String),

    /// Binary file layout violation (bad magic, truncation, ...).
    #[error("format error at byte {offset}: {message}")]
    Format { offset: u64, message: String },

    /// Text file parse failure.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Underlying I/O failure, annotated with the path when known.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Wraps an I/O error with the path it occurred on.
    pub fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        Error::Io {
            path: path.display().to_string(),
            source,
        }
    }
}
