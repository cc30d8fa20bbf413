//! Stage orchestration for every subcommand. Artifacts are staged and moved
//! into the output directory only after every stage has succeeded.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use collective::io;
use collective::participation::Analysis;
use collective::{
    agglomerate, analyze, correlate, correlation_distance, cut_at_correlation, independency_pdf, read_csv,
    reorder_heatmap, CorrelationMatrix, Linkage, PriceSeries, ReturnPanel, RNG_ALGORITHM,
};
use serde::Serialize;

use crate::config::{Artifact, ClusterConfig, RprConfig, RunConfig, SynthConfig};
use crate::error::{CliError, Stage, StageExt};
use crate::output::{sha256_hex, write_atomic, Staging};

pub const MANIFEST: &str = "manifest.json";

#[derive(Debug, Clone, Default)]
pub struct RunSummary {
    pub written: Vec<PathBuf>,
    pub n_assets: usize,
    pub delta: Option<f64>,
    pub delta_std: Option<f64>,
    pub communities: Option<usize>,
}

#[derive(Serialize)]
struct InputRecord {
    path: String,
    sha256: String,
}

#[derive(Serialize)]
struct Manifest<'a, C: Serialize> {
    command: &'a str,
    config: &'a C,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rng: Option<&'a str>,
    input: InputRecord,
    libraries: BTreeMap<&'a str, &'a str>,
    artifacts: &'a BTreeMap<String, String>,
}

fn libraries() -> BTreeMap<&'static str, &'static str> {
    BTreeMap::from([
        ("collective-cli", env!("CARGO_PKG_VERSION")),
        ("collective-core", collective::VERSION),
    ])
}

fn read_input(path: &Path, stage: Stage) -> Result<(Vec<u8>, InputRecord), CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::io(stage, path, e))?;
    let record = InputRecord {
        path: path.display().to_string(),
        sha256: sha256_hex(&bytes),
    };
    Ok((bytes, record))
}

fn finish<C: Serialize>(
    mut staging: Staging,
    command: &str,
    config: &C,
    seed: Option<u64>,
    input: InputRecord,
) -> Result<Vec<PathBuf>, CliError> {
    let artifacts = staging.digests().clone();
    let manifest = Manifest {
        command,
        config,
        seed,
        rng: seed.map(|_| RNG_ALGORITHM),
        input,
        libraries: libraries(),
        artifacts: &artifacts,
    };
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::new(Stage::Output, e.into()))?;
    staging.write(MANIFEST, text + "\n")?;
    staging.commit()
}

/// Loads, filters and aligns prices, then builds the correlation matrix.
pub fn correlation_from_prices(cfg: &RunConfig, bytes: &[u8]) -> Result<CorrelationMatrix, CliError> {
    let series = read_csv(bytes, cfg.layout).stage(Stage::Ingest)?;
    let series: Vec<PriceSeries> = series.iter().map(|s| s.restrict(cfg.from, cfg.to)).collect();
    let panel = collective::align(&series, cfg.align).stage(Stage::Ingest)?;
    let returns = ReturnPanel::from_prices(&panel).stage(Stage::Returns)?;
    Ok(correlate(&returns))
}

fn emit_participation(
    staging: &mut Staging,
    c: &CorrelationMatrix,
    ensemble: usize,
    seed: u64,
    bins: usize,
    report: bool,
    histogram: bool,
) -> Result<Analysis, CliError> {
    let analysis = analyze(c, ensemble, seed).stage(Stage::Participation)?;
    if report {
        staging.write("report.json", io::report_json(&analysis.report).stage(Stage::Output)?)?;
        staging.write("pr.csv", io::pr_csv(&analysis.report, &analysis.null))?;
        staging.write("npr.csv", io::npr_csv(&analysis.report, &analysis.null))?;
    }
    if histogram {
        let h = independency_pdf(&analysis.report.independency, bins).stage(Stage::Participation)?;
        staging.write("independency_hist.csv", io::histogram_csv(&h))?;
    }
    Ok(analysis)
}

fn emit_clustering(
    staging: &mut Staging,
    c: &CorrelationMatrix,
    linkage: Linkage,
    threshold: f64,
    dendrogram: bool,
    heatmap: bool,
) -> Result<usize, CliError> {
    let tree = agglomerate(&correlation_distance(c), linkage);
    let communities = cut_at_correlation(&tree, threshold).stage(Stage::Clustering)?;
    if dendrogram {
        staging.write("dendrogram.newick", io::newick(&tree))?;
        staging.write("dendrogram.json", io::dendrogram_json(&tree).stage(Stage::Output)?)?;
        staging.write("communities.csv", io::communities_csv(&communities))?;
    }
    if heatmap {
        let h = reorder_heatmap(c, &tree).stage(Stage::Clustering)?;
        staging.write("heatmap.csv", io::heatmap_csv(&h))?;
        staging.write("heatmap.json", io::heatmap_sidecar_json(&h).stage(Stage::Output)?)?;
    }
    Ok(communities.groups().len())
}

/// Full pipeline: prices → returns → correlation → participation ratios
/// against the shuffled ensemble → clustering → artifacts and manifest.
pub fn run_pipeline(cfg: &RunConfig) -> Result<RunSummary, CliError> {
    cfg.validate()?;
    let (bytes, input) = read_input(&cfg.input, Stage::Ingest)?;
    let c = correlation_from_prices(cfg, &bytes)?;
    let mut staging = Staging::new(&cfg.out)?;

    if cfg.emits(Artifact::Correlation) {
        staging.write("correlation.csv", io::correlation_csv(&c))?;
        staging.write("correlation.json", io::correlation_json(&c).stage(Stage::Output)?)?;
    }
    let analysis = if cfg.emits(Artifact::Report) || cfg.emits(Artifact::Histogram) {
        Some(emit_participation(
            &mut staging,
            &c,
            cfg.ensemble,
            cfg.seed,
            cfg.bins,
            cfg.emits(Artifact::Report),
            cfg.emits(Artifact::Histogram),
        )?)
    } else {
        None
    };
    let communities = if cfg.emits(Artifact::Dendrogram) || cfg.emits(Artifact::Heatmap) {
        Some(emit_clustering(
            &mut staging,
            &c,
            cfg.linkage,
            cfg.threshold,
            cfg.emits(Artifact::Dendrogram),
            cfg.emits(Artifact::Heatmap),
        )?)
    } else {
        None
    };

    let written = finish(staging, "analyze", cfg, Some(cfg.seed), input)?;
    Ok(RunSummary {
        written,
        n_assets: c.n(),
        delta: analysis.as_ref().map(|a| a.report.delta),
        delta_std: analysis.as_ref().map(|a| a.report.delta_std),
        communities,
    })
}

fn read_correlation(path: &Path) -> Result<(CorrelationMatrix, InputRecord), CliError> {
    let (bytes, input) = read_input(path, Stage::Ingest)?;
    let c = io::read_correlation_csv(bytes.as_slice()).stage(Stage::Ingest)?;
    Ok((c, input))
}

/// Relative participation ratio of a correlation matrix stored as CSV.
pub fn run_rpr(cfg: &RprConfig) -> Result<RunSummary, CliError> {
    cfg.validate()?;
    let (c, input) = read_correlation(&cfg.input)?;
    let mut staging = Staging::new(&cfg.out)?;
    let analysis = emit_participation(&mut staging, &c, cfg.ensemble, cfg.seed, cfg.bins, true, true)?;
    let written = finish(staging, "rpr", cfg, Some(cfg.seed), input)?;
    Ok(RunSummary {
        written,
        n_assets: c.n(),
        delta: Some(analysis.report.delta),
        delta_std: Some(analysis.report.delta_std),
        communities: None,
    })
}

/// Dendrogram, communities and reordered heatmap of a correlation matrix stored as CSV.
pub fn run_cluster(cfg: &ClusterConfig) -> Result<RunSummary, CliError> {
    cfg.validate()?;
    let (c, input) = read_correlation(&cfg.input)?;
    let mut staging = Staging::new(&cfg.out)?;
    let communities = emit_clustering(&mut staging, &c, cfg.linkage, cfg.threshold, true, true)?;
    let written = finish(staging, "cluster", cfg, None, input)?;
    Ok(RunSummary {
        written,
        n_assets: c.n(),
        communities: Some(communities),
        ..RunSummary::default()
    })
}

/// Writes a synthetic market as a wide price CSV.
pub fn run_synth(cfg: &SynthConfig) -> Result<RunSummary, CliError> {
    cfg.validate()?;
    let returns = collective::synth::generate(&cfg.spec).stage(Stage::Synth)?;
    let panel = collective::synth::to_prices(&returns, cfg.initial_price, cfg.volatility).stage(Stage::Synth)?;
    write_atomic(&cfg.out, io::price_panel_csv(&panel))?;
    Ok(RunSummary {
        written: vec![cfg.out.clone()],
        n_assets: panel.n_assets(),
        ..RunSummary::default()
    })
}
