use std::path::PathBuf;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand, ValueEnum};
use collective::synth::{Block, FactorSpec};
use collective::{AlignPolicy, Layout, Linkage};

use crate::config::{Artifact, ClusterConfig, RprConfig, RunConfig, SynthConfig, DEFAULT_SEED, DEFAULT_THRESHOLD};

#[derive(Debug, Parser)]
#[command(name = "collective", version, about = "Collective-behavior analysis of correlated price series")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic factor-model market as a wide price CSV
    Synth(SynthArgs),
    /// Run the full pipeline on a price CSV
    Analyze(AnalyzeArgs),
    /// Cluster a correlation matrix CSV into a dendrogram and communities
    Cluster(ClusterArgs),
    /// Participation ratios and δ of a correlation matrix CSV
    Rpr(RprArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum LayoutArg {
    Wide,
    Long,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum AlignArg {
    Intersection,
    ForwardFill,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum LinkageArg {
    Average,
    Single,
    Complete,
}

impl From<LinkageArg> for Linkage {
    fn from(l: LinkageArg) -> Self {
        match l {
            LinkageArg::Average => Linkage::Average,
            LinkageArg::Single => Linkage::Single,
            LinkageArg::Complete => Linkage::Complete,
        }
    }
}

fn parse_date(s: &str) -> Result<NaiveDate, String> {
    collective::ingest::parse_date(s).ok_or_else(|| format!("'{s}' is not a YYYY-MM-DD date"))
}

fn parse_block(s: &str) -> Result<Block, String> {
    let (size, gamma) = s
        .split_once(':')
        .ok_or_else(|| format!("block '{s}' must look like SIZE:GAMMA"))?;
    Ok(Block {
        size: size.trim().parse().map_err(|_| format!("bad block size in '{s}'"))?,
        gamma: gamma.trim().parse().map_err(|_| format!("bad block gamma in '{s}'"))?,
    })
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Price CSV
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "wide")]
    pub layout: LayoutArg,
    #[arg(long, value_enum, default_value = "intersection")]
    pub align: AlignArg,
    /// Longest run of missing dates a forward fill may bridge
    #[arg(long, default_value_t = 1)]
    pub max_gap: usize,
    /// First date kept (inclusive)
    #[arg(long, value_parser = parse_date)]
    pub from: Option<NaiveDate>,
    /// Last date kept (inclusive)
    #[arg(long, value_parser = parse_date)]
    pub to: Option<NaiveDate>,
    /// Number of shuffled matrices in the null ensemble
    #[arg(long, default_value_t = collective::nullmodel::DEFAULT_ENSEMBLE_SIZE)]
    pub ensemble: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "average")]
    pub linkage: LinkageArg,
    /// Minimum correlation inside a community
    #[arg(long, default_value_t = DEFAULT_THRESHOLD, allow_negative_numbers = true)]
    pub threshold: f64,
    /// Bins of the independency histogram
    #[arg(long, default_value_t = collective::participation::DEFAULT_HISTOGRAM_BINS)]
    pub bins: usize,
    /// Output directory
    #[arg(long)]
    pub out: PathBuf,
    /// Artifact groups to write: report, histogram, dendrogram, heatmap, correlation
    #[arg(long, value_delimiter = ',', default_values_t = Artifact::ALL.map(|a| format!("{a:?}").to_lowercase()))]
    pub emit: Vec<String>,
}

impl AnalyzeArgs {
    pub fn into_config(self) -> Result<RunConfig, String> {
        let mut emit = self
            .emit
            .iter()
            .map(|s| s.parse::<Artifact>())
            .collect::<Result<Vec<_>, _>>()?;
        emit.sort();
        emit.dedup();
        Ok(RunConfig {
            input: self.input,
            layout: match self.layout {
                LayoutArg::Wide => Layout::Wide,
                LayoutArg::Long => Layout::Long,
            },
            align: match self.align {
                AlignArg::Intersection => AlignPolicy::Intersection,
                AlignArg::ForwardFill => AlignPolicy::ForwardFill { max_gap: self.max_gap },
            },
            from: self.from,
            to: self.to,
            ensemble: self.ensemble,
            seed: self.seed,
            linkage: self.linkage.into(),
            threshold: self.threshold,
            bins: self.bins,
            out: self.out,
            emit,
        })
    }
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    /// Correlation matrix CSV (`label,L1,...` header)
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "average")]
    pub linkage: LinkageArg,
    #[arg(long, default_value_t = DEFAULT_THRESHOLD, allow_negative_numbers = true)]
    pub threshold: f64,
    #[arg(long)]
    pub out: PathBuf,
}

impl From<ClusterArgs> for ClusterConfig {
    fn from(a: ClusterArgs) -> Self {
        ClusterConfig {
            input: a.input,
            linkage: a.linkage.into(),
            threshold: a.threshold,
            out: a.out,
        }
    }
}

#[derive(Debug, Args)]
pub struct RprArgs {
    /// Correlation matrix CSV (`label,L1,...` header)
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = collective::nullmodel::DEFAULT_ENSEMBLE_SIZE)]
    pub ensemble: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = collective::participation::DEFAULT_HISTOGRAM_BINS)]
    pub bins: usize,
    #[arg(long)]
    pub out: PathBuf,
}

impl From<RprArgs> for RprConfig {
    fn from(a: RprArgs) -> Self {
        RprConfig {
            input: a.input,
            ensemble: a.ensemble,
            seed: a.seed,
            bins: a.bins,
            out: a.out,
        }
    }
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Number of assets (ignored when blocks are given)
    #[arg(long, default_value_t = 40)]
    pub assets: usize,
    /// Number of returns; the file holds one more date
    #[arg(long, default_value_t = 4000)]
    pub obs: usize,
    /// Loading on the common factor
    #[arg(long, default_value_t = 0.5)]
    pub gamma: f64,
    /// Independent factor block as SIZE:GAMMA; repeat for several blocks
    #[arg(long = "block", value_parser = parse_block)]
    pub blocks: Vec<Block>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Scale of the daily log returns written into prices
    #[arg(long, default_value_t = 0.01)]
    pub volatility: f64,
    #[arg(long, default_value_t = 100.0)]
    pub initial_price: f64,
    /// Output CSV file
    #[arg(long)]
    pub out: PathBuf,
}

impl From<SynthArgs> for SynthConfig {
    fn from(a: SynthArgs) -> Self {
        let spec = if a.blocks.is_empty() {
            FactorSpec::one_factor(a.assets, a.obs, a.gamma, a.seed)
        } else {
            FactorSpec::with_blocks(a.obs, a.blocks, a.seed)
        };
        SynthConfig {
            spec,
            volatility: a.volatility,
            initial_price: a.initial_price,
            out: a.out,
        }
    }
}
