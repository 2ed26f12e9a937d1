use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("parse error at byte {offset}: {message}")]
    ParseAtByte { offset: u64, message: String },

    #[error("parse error at line {line}: {message}")]
    ParseAtLine { line: usize, message: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("cache error: {0}")]
    Cache(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("pole '{0}' has no word present in the model")]
    PoleEmpty(String),

    #[error("pole '{0}' sums to a (near) zero vector")]
    DegeneratePole(String),

    #[error("axis '{0}' is degenerate: both poles point the same way")]
    DegenerateAxis(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("empty intersection: {0}")]
    EmptyIntersection(String),

    #[error("antonym pair {0}-{1} has a word missing from the model")]
    PairUnresolved(String, String),

    #[error("empty result: {0}")]
    EmptyResult(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for the parse family (byte, line and free-form).
    pub fn is_parse(&self) -> bool {
        matches!(
            self,
            Error::ParseAtByte { .. } | Error::ParseAtLine { .. } | Error::Parse(_)
        )
    }
}
