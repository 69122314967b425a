use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Geometry or kernel constraints that the display configuration cannot satisfy.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("invalid plane index {0}: plane 0 has no pattern and |k| must not exceed the configured maximum")]
    InvalidPlane(i32),

    #[error("argument error: {0}")]
    Argument(String),

    /// Malformed input file. `location` names a byte offset for binary formats and a
    /// 1-based line number for text formats.
    #[error("format error at {location}: {message}")]
    Format { location: String, message: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn argument(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub(crate) fn at_byte(offset: usize, msg: impl Into<String>) -> Self {
        Error::Format {
            location: format!("byte {offset}"),
            message: msg.into(),
        }
    }

    pub(crate) fn at_line(line: usize, msg: impl Into<String>) -> Self {
        Error::Format {
            location: format!("line {line}"),
            message: msg.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Argument(_) | Error::InvalidPlane(_) => 2,
            Error::Format { .. } => 3,
            Error::Config(_) => 4,
            Error::Io { .. } => 5,
        }
    }
}
