use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Fatal errors. Syntax errors in individual scripts are not fatal; they are
/// reported through [`crate::parser::ParseOutcome::failed_files`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },

    #[error("{} does not exist", .0.display())]
    NotFound(PathBuf),

    #[error(transparent)]
    Config(#[from] ConfigError),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {message}")]
    Unreadable { path: String, message: String },

    #[error("malformed config file: {0}")]
    Syntax(String),

    #[error("unknown config key `{0}`")]
    UnknownKey(String),

    #[error("config key `{key}` must be in section [smells], found in [{section}]")]
    WrongSection { key: String, section: String },

    #[error("invalid value for config key `{key}`: {message}")]
    InvalidValue { key: String, message: String },
}

/// A script that could not be parsed. Carries the 1-based line when known.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct SyntaxError {
    pub line: usize,
    pub message: String,
}

impl SyntaxError {
    pub fn new(line: usize, message: impl Into<String>) -> Self {
        SyntaxError {
            line,
            message: message.into(),
        }
    }
}
