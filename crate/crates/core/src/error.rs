use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("estimation failed: {0}")]
    EstimationFailed(String),

    #[error("empty overlap: record of {duration_s} s is shorter than the {delay_s} s arm delay")]
    EmptyOverlap { duration_s: f64, delay_s: f64 },

    #[error("file not found: {}", .0.display())]
    MissingFile(PathBuf),

    #[error("{}: row {row}: cannot parse {column} value {value:?} as a number", path.display())]
    NonNumeric {
        path: PathBuf,
        row: usize,
        column: String,
        value: String,
    },

    #[error("{}: row {row}: negative power {power}", path.display())]
    NegativePower { path: PathBuf, row: usize, power: f64 },

    #[error("{}: need at least 2 data rows, found {found}", path.display())]
    TooFewRows { path: PathBuf, found: usize },

    #[error("{}: malformed table: {message}", path.display())]
    Malformed { path: PathBuf, message: String },

    #[error("config key `{key}`: {message}")]
    Config { key: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
