use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid MD5 digest {0:?}: expected 32 hex characters")]
    InvalidDigest(String),

    #[error("invalid plaintext: {0}")]
    InvalidPlaintext(String),

    #[error("invalid reduction spec: {0}")]
    InvalidReductionSpec(String),

    #[error("wordlist is empty")]
    EmptyWordlist,

    #[error("wordlist entry {index} ({entry:?}) must be non-empty ASCII without whitespace")]
    InvalidWordlistEntry { index: usize, entry: String },

    #[error("{path}: line {line}: {reason}")]
    TableFormat {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("failed to access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("marked set is empty")]
    EmptyMarkedSet,

    #[error("basis index {index} out of range for dimension {dimension}")]
    IndexOutOfRange { index: usize, dimension: usize },

    #[error("dimension {0} is not a power of two")]
    InvalidDimension(usize),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("configuration error: {0}")]
    Config(String),
}
