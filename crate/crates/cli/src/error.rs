use std::fmt;
use std::path::Path;

use collective::{Error, ErrorClass};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Config,
    Ingest,
    Returns,
    Correlation,
    Participation,
    Clustering,
    Synth,
    Output,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Stage::Config => "config",
            Stage::Ingest => "ingest",
            Stage::Returns => "returns",
            Stage::Correlation => "correlation",
            Stage::Participation => "participation",
            Stage::Clustering => "clustering",
            Stage::Synth => "synth",
            Stage::Output => "output",
        };
        f.write_str(name)
    }
}

/// A pipeline failure tagged with the stage that produced it.
#[derive(Debug, Error)]
#[error("{stage}: {source}")]
pub struct CliError {
    pub stage: Stage,
    #[source]
    pub source: Error,
}

impl CliError {
    pub fn new(stage: Stage, source: Error) -> Self {
        CliError { stage, source }
    }

    pub fn io(stage: Stage, path: &Path, source: std::io::Error) -> Self {
        CliError::new(
            stage,
            Error::Io {
                path: path.to_path_buf(),
                source,
            },
        )
    }

    pub fn config(message: impl Into<String>) -> Self {
        CliError::new(Stage::Config, Error::Invalid(message.into()))
    }

    /// 2 input error, 3 numerical failure, 4 I/O error.
    pub fn exit_code(&self) -> i32 {
        match self.source.class() {
            ErrorClass::Input => 2,
            ErrorClass::Numerical => 3,
            ErrorClass::Io => 4,
        }
    }
}

pub trait StageExt<T> {
    fn stage(self, stage: Stage) -> Result<T, CliError>;
}

impl<T> StageExt<T> for Result<T, Error> {
    fn stage(self, stage: Stage) -> Result<T, CliError> {
        self.map_err(|e| CliError::new(stage, e))
    }
}
