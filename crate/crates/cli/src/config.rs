use std::path::PathBuf;
use std::str::FromStr;

use chrono::NaiveDate;
use collective::synth::FactorSpec;
use collective::{AlignPolicy, Layout, Linkage};
use serde::Serialize;

use crate::error::CliError;

/// Groups of files the `analyze` pipeline can emit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Artifact {
    /// report.json, pr.csv, npr.csv
    Report,
    /// independency_hist.csv
    Histogram,
    /// dendrogram.newick, dendrogram.json, communities.csv
    Dendrogram,
    /// heatmap.csv, heatmap.json
    Heatmap,
    /// correlation.csv, correlation.json
    Correlation,
}

impl Artifact {
    pub const ALL: [Artifact; 5] = [
        Artifact::Report,
        Artifact::Histogram,
        Artifact::Dendrogram,
        Artifact::Heatmap,
        Artifact::Correlation,
    ];
}

impl FromStr for Artifact {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "report" => Ok(Artifact::Report),
            "histogram" => Ok(Artifact::Histogram),
            "dendrogram" => Ok(Artifact::Dendrogram),
            "heatmap" => Ok(Artifact::Heatmap),
            "correlation" => Ok(Artifact::Correlation),
            other => Err(format!(
                "unknown artifact '{other}' (expected report, histogram, dendrogram, heatmap or correlation)"
            )),
        }
    }
}

/// Settings for a full `analyze` run.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub input: PathBuf,
    pub layout: Layout,
    pub align: AlignPolicy,
    pub from: Option<NaiveDate>,
    pub to: Option<NaiveDate>,
    pub ensemble: usize,
    pub seed: u64,
    pub linkage: Linkage,
    pub threshold: f64,
    pub bins: usize,
    /// Not recorded in the manifest so that runs into different directories compare equal.
    #[serde(skip)]
    pub out: PathBuf,
    pub emit: Vec<Artifact>,
}

impl RunConfig {
    pub fn new(input: impl Into<PathBuf>, out: impl Into<PathBuf>) -> Self {
        RunConfig {
            input: input.into(),
            layout: Layout::Wide,
            align: AlignPolicy::Intersection,
            from: None,
            to: None,
            ensemble: collective::nullmodel::DEFAULT_ENSEMBLE_SIZE,
            seed: DEFAULT_SEED,
            linkage: Linkage::Average,
            threshold: DEFAULT_THRESHOLD,
            bins: collective::participation::DEFAULT_HISTOGRAM_BINS,
            out: out.into(),
            emit: Artifact::ALL.to_vec(),
        }
    }

    pub fn emits(&self, a: Artifact) -> bool {
        self.emit.contains(&a)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        check_threshold(self.threshold)?;
        check_ensemble(self.ensemble)?;
        check_bins(self.bins)?;
        if let (Some(f), Some(t)) = (self.from, self.to) {
            if f > t {
                return Err(CliError::config(format!("--from {f} is after --to {t}")));
            }
        }
        if self.emit.is_empty() {
            return Err(CliError::config("nothing to emit"));
        }
        Ok(())
    }
}

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_THRESHOLD: f64 = 0.3;

/// Settings for `rpr`: participation analysis of a stored correlation matrix.
#[derive(Debug, Clone, Serialize)]
pub struct RprConfig {
    pub input: PathBuf,
    pub ensemble: usize,
    pub seed: u64,
    pub bins: usize,
    #[serde(skip)]
    pub out: PathBuf,
}

impl RprConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        check_ensemble(self.ensemble)?;
        check_bins(self.bins)
    }
}

/// Settings for `cluster`: dendrogram and communities of a stored correlation matrix.
#[derive(Debug, Clone, Serialize)]
pub struct ClusterConfig {
    pub input: PathBuf,
    pub linkage: Linkage,
    pub threshold: f64,
    #[serde(skip)]
    pub out: PathBuf,
}

impl ClusterConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        check_threshold(self.threshold)
    }
}

/// Settings for `synth`: a synthetic market written as a wide price CSV.
#[derive(Debug, Clone, Serialize)]
pub struct SynthConfig {
    pub spec: FactorSpec,
    /// Daily log-return scale applied to the unit-variance returns.
    pub volatility: f64,
    pub initial_price: f64,
    pub out: PathBuf,
}

impl SynthConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.volatility > 0.0 && self.volatility.is_finite()) {
            return Err(CliError::config("--volatility must be positive"));
        }
        if !(self.initial_price > 0.0 && self.initial_price.is_finite()) {
            return Err(CliError::config("--initial-price must be positive"));
        }
        self.spec
            .validate()
            .map_err(|e| CliError::new(crate::error::Stage::Config, e))
    }
}

fn check_threshold(t: f64) -> Result<(), CliError> {
    if t > -1.0 && t < 1.0 {
        Ok(())
    } else {
        Err(CliError::config(format!("--threshold {t} must lie in (-1, 1)")))
    }
}

fn check_ensemble(m: usize) -> Result<(), CliError> {
    if m >= 1 {
        Ok(())
    } else {
        Err(CliError::config("--ensemble must be at least 1"))
    }
}

fn check_bins(b: usize) -> Result<(), CliError> {
    if b >= 2 {
        Ok(())
    } else {
        Err(CliError::config("--bins must be at least 2"))
    }
}
