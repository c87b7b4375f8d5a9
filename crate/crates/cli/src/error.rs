//! Runner-level errors: configuration problems, I/O, and anything the core
//! library refuses (its guard and precondition messages pass through).

use std::fmt;
use std::path::PathBuf;

#[derive(Debug)]
pub enum Error {
    /// Reading or writing an artifact failed.
    Io { path: PathBuf, source: std::io::Error },
    /// The config file is not valid TOML or does not match the experiment's
    /// parameter schema (unknown keys are errors, not warnings).
    ConfigParse { path: PathBuf, message: String },
    /// The config file names a different experiment than the subcommand.
    ExperimentMismatch { expected: &'static str, found: String },
    /// A flag or parameter value is out of range.
    InvalidParameter { what: &'static str, details: String },
    /// A plot was requested for a table with no plottable rows.
    EmptyTable,
    /// Propagated from the core library (guards echo their names).
    Core(modmax_core::error::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Io { path, source } => {
                write!(f, "i/o on {}: {source}", path.display())
            }
            Error::ConfigParse { path, message } => {
                write!(f, "config {}: {message}", path.display())
            }
            Error::ExperimentMismatch { expected, found } => {
                write!(
                    f,
                    "config is for experiment {found:?}, but the subcommand runs {expected:?}"
                )
            }
            Error::InvalidParameter { what, details } => {
                write!(f, "invalid {what}: {details}")
            }
            Error::EmptyTable => write!(f, "cannot plot an empty table"),
            Error::Core(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io { source, .. } => Some(source),
            Error::Core(e) => Some(e),
            _ => None,
        }
    }
}

impl From<modmax_core::error::Error> for Error {
    fn from(e: modmax_core::error::Error) -> Self {
        Error::Core(e)
    }
}
