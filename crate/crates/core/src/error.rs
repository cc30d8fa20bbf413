use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the analysis pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: non-positive price {price} for asset '{asset}' on {date}")]
    NonPositivePrice {
        line: usize,
        asset: String,
        date: String,
        price: f64,
    },
    #[error("duplicate date {date} in series '{asset}'")]
    DuplicateDate { asset: String, date: String },
    #[error("empty input: {0}")]
    Empty(String),
    #[error("insufficient overlap: {found} common dates after alignment, at least 3 required")]
    InsufficientOverlap { found: usize },
    #[error("asset '{0}' has zero return variance and cannot be normalized")]
    ZeroVariance(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("eigensolver did not converge (off-diagonal residual {residual:e})")]
    NoConvergence { residual: f64 },
    #[error("shuffle ensemble member {member}: {source}")]
    EnsembleMember {
        member: usize,
        #[source]
        source: Box<Error>,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Coarse classification used to choose process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Input,
    Numerical,
    Io,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Io { .. } => ErrorClass::Io,
            Error::NoConvergence { .. } => ErrorClass::Numerical,
            Error::EnsembleMember { source, .. } => source.class(),
            Error::Csv(e) if e.is_io_error() => ErrorClass::Io,
            Error::Json(e) if e.is_io() => ErrorClass::Io,
            _ => ErrorClass::Input,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
