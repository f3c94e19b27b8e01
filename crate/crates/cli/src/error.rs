use std::fmt;
use std::io;
use std::path::{Path, PathBuf};

/// Process exit code for invalid input or configuration.
pub const EXIT_VALIDATION: i32 = 2;
/// Process exit code when calibration stopped before converging.
pub const EXIT_NOT_CONVERGED: i32 = 3;
/// Process exit code for filesystem failures.
pub const EXIT_IO: i32 = 1;

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Io { path: PathBuf, source: io::Error },
}

impl CliError {
    pub fn validation(msg: impl Into<String>) -> Self {
        CliError::Validation(msg.into())
    }

    pub fn io(path: &Path, source: io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Io { .. } => EXIT_IO,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "{m}"),
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
        }
    }
}

impl std::error::Error for CliError {}

impl From<pco_core::Error> for CliError {
    fn from(e: pco_core::Error) -> Self {
        CliError::Validation(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
