use std::path::PathBuf;

use thiserror::Error;

/// Exit status for input that could not be read or parsed.
pub const EXIT_PARSE: i32 = 3;
/// Exit status for failures inside a computation.
pub const EXIT_COMPUTE: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}:{line}:{column}: {message}")]
    Syntax { path: String, line: usize, column: usize, message: String },

    #[error("{path}: {message}")]
    Invalid { path: String, message: String },

    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("config {path}: {message}")]
    Config { path: PathBuf, message: String },

    #[error("bad argument: {0}")]
    Argument(String),

    #[error(transparent)]
    Compute(#[from] beamsplit_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Compute(_) => EXIT_COMPUTE,
            _ => EXIT_PARSE,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
