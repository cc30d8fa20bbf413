//! Command-line pipeline around the `collective` library.

pub mod args;
pub mod config;
pub mod error;
pub mod output;
pub mod pipeline;

pub use config::{Artifact, ClusterConfig, RprConfig, RunConfig, SynthConfig};
pub use error::{CliError, Stage};
pub use pipeline::{run_cluster, run_pipeline, run_rpr, run_synth, RunSummary};
