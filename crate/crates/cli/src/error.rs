use std::fmt;
use std::path::{Path, PathBuf};

use dctapprox::Error;

pub const EXIT_USAGE: u8 = 2;
pub const EXIT_INFEASIBLE: u8 = 3;
pub const EXIT_IO: u8 = 4;

/// Error carrying the process exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    pub fn io(path: &Path, err: impl fmt::Display) -> Self {
        CliError {
            code: EXIT_IO,
            message: format!("{}: {err}", path.display()),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

fn code_for(err: &Error) -> u8 {
    match err {
        Error::Io(_) => EXIT_IO,
        Error::Csv(e) if matches!(e.kind(), csv::ErrorKind::Io(_)) => EXIT_IO,
        Error::Json(e) if e.is_io() => EXIT_IO,
        Error::Infeasible(_) => EXIT_INFEASIBLE,
        _ => EXIT_USAGE,
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        CliError {
            code: code_for(&err),
            message: err.to_string(),
        }
    }
}

/// Attaches a path to library errors, keeping their exit code.
pub trait WithPath<T> {
    fn at(self, path: &Path) -> Result<T, CliError>;
}

impl<T> WithPath<T> for Result<T, Error> {
    fn at(self, path: &Path) -> Result<T, CliError> {
        self.map_err(|e| CliError {
            code: code_for(&e),
            message: format!("{}: {e}", path.display()),
        })
    }
}

impl<T> WithPath<T> for std::io::Result<T> {
    fn at(self, path: &Path) -> Result<T, CliError> {
        self.map_err(|e| CliError::io(path, e))
    }
}

/// Sibling of `path` with `suffix` appended to the file stem, keeping the extension.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}{suffix}.{}", ext.to_string_lossy()),
        None => format!("{stem}{suffix}"),
    };
    path.with_file_name(name)
}
