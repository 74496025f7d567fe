//! Error types shared across the simulator.

use std::path::PathBuf;
use thiserror::Error;

/// Errors produced by topology/trace ingestion, configuration, and campaign
/// execution.
#[derive(Debug, Error)]
pub enum Error {
    /// An operation was called with arguments outside its contract.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A CSV or JSON input could not be parsed.
    #[error("parse error in {path} (line {line}): {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    /// Parsed input violates a model constraint (e.g. AP outside the area).
    #[error("validation error: {0}")]
    Validation(String),

    /// The simulation configuration is inconsistent or unreadable.
    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A campaign finished without a single successful realization.
    #[error("campaign produced no successful realizations")]
    EmptyCampaign,
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
