use std::path::PathBuf;

/// Errors produced by solvers, ingestion, and the analysis harness.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Invalid configuration: bad parameter values, inconsistent grids,
    /// a driver of the wrong kind for a solver, and similar.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// Input data could not be parsed (file, row, and reason included).
    #[error("parse error in {path}, line {line}: {reason}")]
    Parse {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    /// Underlying I/O failure.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// An iterative numerical routine failed to converge.
    #[error("numerical non-convergence: {0}")]
    NonConvergence(String),

    /// Evaluation outside a function's mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
