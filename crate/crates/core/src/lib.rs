//! Collective-behavior analysis of correlated time series.
//!
//! The pipeline runs prices → normalized log returns → equal-time
//! correlation matrix → eigendecomposition, then measures how localized the
//! eigenvectors are (participation ratios) against a null model whose
//! off-diagonal correlations have been shuffled. Correlation-distance
//! clustering groups assets into communities.

pub mod clustering;
pub mod correlation;
pub mod eigen;
pub mod error;
pub mod ingest;
pub mod io;
pub mod matrix;
pub mod nullmodel;
pub mod participation;
pub mod returns;
pub mod synth;

pub use clustering::{
    agglomerate, correlation_distance, cut_at_correlation, reorder_heatmap, ClusterTree, CommunityAssignment,
    DistanceMatrix, Heatmap, Linkage,
};
pub use correlation::{correlate, eigendecompose, CorrelationMatrix};
pub use eigen::{symmetric_eigen, EigenSystem};
pub use error::{Error, ErrorClass, Result};
pub use ingest::{align, load_csv, read_csv, AlignPolicy, Layout, PricePanel, PriceSeries};
pub use matrix::Matrix;
pub use nullmodel::{make_ensemble, shuffle_once, ShuffleEnsemble, RNG_ALGORITHM};
pub use participation::{
    analyze, independency_pdf, node_participation_ratios, participation_ratios, relative_participation_ratio,
    Analysis, CollectiveReport, Histogram, NullStatistics,
};
pub use returns::{log_returns, normalize, ReturnPanel};
pub use synth::{generate_blocks, generate_one_factor, Block, FactorSpec};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
