use std::path::PathBuf;

use num_complex::Complex64;

/// Errors raised by the numerical building blocks and the physics layers on top of them.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("range error: {0}")]
    Range(String),

    #[error("no root in region (winding number {winding})")]
    NoRootInRegion { winding: i64 },

    #[error("{winding} roots in region; shrink the search region")]
    MultipleRootsInRegion { winding: i64 },

    #[error("root finder did not converge: best estimate {best}, scaled residual {residual:.3e}")]
    RootNotConverged { best: Complex64, residual: f64 },

    #[error("accuracy target missed: estimate {estimate}, error bound {error_bound:.3e}")]
    Accuracy { estimate: Complex64, error_bound: f64 },

    #[error("no guided mode: {0}")]
    NoMode(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("fit did not converge: {0}")]
    FitNotConverged(String),

    #[error("degenerate histogram: {0}")]
    DegenerateHistogram(String),

    #[error("empty stream")]
    EmptyStream,

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Short machine-readable tag, used by the command-line front end.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid-input",
            Error::Range(_) => "range",
            Error::NoRootInRegion { .. } => "no-root",
            Error::MultipleRootsInRegion { .. } => "multiple-roots",
            Error::RootNotConverged { .. } => "root-not-converged",
            Error::Accuracy { .. } => "accuracy",
            Error::NoMode(_) => "no-mode",
            Error::InsufficientData(_) => "insufficient-data",
            Error::FitNotConverged(_) => "fit-not-converged",
            Error::DegenerateHistogram(_) => "degenerate-histogram",
            Error::EmptyStream => "empty-stream",
            Error::Parse { .. } => "parse",
            Error::Io { .. } => "io",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
