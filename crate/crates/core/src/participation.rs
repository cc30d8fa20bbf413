//! Participation ratios of eigenvectors, their node-wise counterpart, and
//! the relative participation ratio against the shuffled null model.
//!
//! For eigenvectors `u_k` of an `N × N` correlation matrix:
//!
//! ```text
//! P_k = 1 / Σ_l u_k(l)⁴        (how many assets an eigenvector spreads over)
//! N_l = 1 / Σ_k u_k(l)⁴        (how many eigenvectors asset l spreads over)
//! δ   = (⟨P_sh⟩ − ⟨P⟩) / ⟨P_sh⟩
//! ```
//!
//! Both ratios lie in `[1, N]`. `⟨·⟩` averages over all `N` eigenvectors and
//! `P_sh` refers to a shuffled copy of the matrix.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::correlation::{eigendecompose, CorrelationMatrix};
use crate::eigen::{symmetric_eigen, EigenSystem};
use crate::error::{Error, Result};
use crate::nullmodel::{shuffled_member, RNG_ALGORITHM};

pub const DEFAULT_HISTOGRAM_BINS: usize = 20;

pub fn participation_ratios(es: &EigenSystem) -> Vec<f64> {
    (0..es.len())
        .map(|k| 1.0 / es.eigenvector(k).iter().map(|x| x.powi(4)).sum::<f64>())
        .collect()
}

pub fn node_participation_ratios(es: &EigenSystem) -> Vec<f64> {
    let n = es.len();
    let mut fourth = vec![0.0; n];
    for k in 0..n {
        for (acc, x) in fourth.iter_mut().zip(es.eigenvector(k)) {
            *acc += x.powi(4);
        }
    }
    fourth.into_iter().map(|s| 1.0 / s).collect()
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// `(⟨P_sh⟩ − ⟨P⟩) / ⟨P_sh⟩`.
pub fn relative_delta(mean_pr: f64, mean_pr_shuffled: f64) -> f64 {
    (mean_pr_shuffled - mean_pr) / mean_pr_shuffled
}

/// Shuffled-ensemble statistics relative to one base matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullStatistics {
    pub members: usize,
    pub seed: u64,
    /// δ of each ensemble member.
    pub deltas: Vec<f64>,
    pub delta: f64,
    /// Population standard deviation of `deltas`; zero for a single member.
    pub delta_std: f64,
    /// `P_k` of the shuffled matrices averaged position-wise in descending-λ order.
    pub mean_pr: Vec<f64>,
    /// Each member's NPRs sorted ascending, then averaged position-wise.
    pub mean_sorted_npr: Vec<f64>,
}

struct MemberStats {
    mean_pr: f64,
    pr: Vec<f64>,
    sorted_npr: Vec<f64>,
}

/// Runs the shuffled ensemble for `c` and compares it with `base_mean_pr`,
/// the mean participation ratio of `c` itself.
pub fn null_statistics(c: &CorrelationMatrix, base_mean_pr: f64, count: usize, seed: u64) -> Result<NullStatistics> {
    if count == 0 {
        return Err(Error::Invalid("ensemble size must be at least 1".into()));
    }
    let n = c.n();
    let stats: Vec<MemberStats> = (0..count)
        .into_par_iter()
        .map(|m| {
            let shuffled = shuffled_member(c, seed, m);
            let es = symmetric_eigen(shuffled.entries()).map_err(|e| Error::EnsembleMember {
                member: m,
                source: Box::new(e),
            })?;
            let pr = participation_ratios(&es);
            let mut sorted_npr = node_participation_ratios(&es);
            sorted_npr.sort_by(f64::total_cmp);
            Ok(MemberStats {
                mean_pr: mean(&pr),
                pr,
                sorted_npr,
            })
        })
        .collect::<Result<_>>()?;

    let deltas: Vec<f64> = stats.iter().map(|s| relative_delta(base_mean_pr, s.mean_pr)).collect();
    let delta = mean(&deltas);
    let delta_std = (deltas.iter().map(|d| (d - delta).powi(2)).sum::<f64>() / count as f64).sqrt();
    let mut mean_pr = vec![0.0; n];
    let mut mean_sorted_npr = vec![0.0; n];
    for s in &stats {
        for (acc, x) in mean_pr.iter_mut().zip(&s.pr) {
            *acc += x;
        }
        for (acc, x) in mean_sorted_npr.iter_mut().zip(&s.sorted_npr) {
            *acc += x;
        }
    }
    mean_pr.iter_mut().chain(mean_sorted_npr.iter_mut()).for_each(|x| *x /= count as f64);

    Ok(NullStatistics {
        members: count,
        seed,
        deltas,
        delta,
        delta_std,
        mean_pr,
        mean_sorted_npr,
    })
}

/// δ and its ensemble spread for `count` shuffles of `c`.
pub fn relative_participation_ratio(c: &CorrelationMatrix, count: usize, seed: u64) -> Result<(f64, f64)> {
    let es = eigendecompose(c)?;
    let stats = null_statistics(c, mean(&participation_ratios(&es)), count, seed)?;
    Ok((stats.delta, stats.delta_std))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleMeta {
    #[serde(rename = "M")]
    pub members: usize,
    pub seed: u64,
    pub rng: String,
}

/// Everything reported about one correlation matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollectiveReport {
    pub labels: Vec<String>,
    pub lambda: Vec<f64>,
    pub pr: Vec<f64>,
    pub pr_normalized: Vec<f64>,
    pub npr: Vec<f64>,
    pub independency: Vec<f64>,
    pub delta: f64,
    pub delta_std: f64,
    pub ensemble_meta: EnsembleMeta,
}

/// Full analysis of one matrix: decomposition, report and null statistics.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub eigen: EigenSystem,
    pub report: CollectiveReport,
    pub null: NullStatistics,
}

pub fn analyze(c: &CorrelationMatrix, count: usize, seed: u64) -> Result<Analysis> {
    let eigen = eigendecompose(c)?;
    let n = c.n() as f64;
    let pr = participation_ratios(&eigen);
    let npr = node_participation_ratios(&eigen);
    let null = null_statistics(c, mean(&pr), count, seed)?;
    let report = CollectiveReport {
        labels: c.labels().to_vec(),
        lambda: eigen.eigenvalues().to_vec(),
        pr_normalized: pr.iter().map(|p| p / n).collect(),
        pr,
        independency: npr.iter().map(|x| 1.0 / x).collect(),
        npr,
        delta: null.delta,
        delta_std: null.delta_std,
        ensemble_meta: EnsembleMeta {
            members: count,
            seed,
            rng: RNG_ALGORITHM.to_string(),
        },
    };
    Ok(Analysis { eigen, report, null })
}

/// Histogram over logarithmically spaced bins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    /// `bins + 1` edges; a degenerate histogram has the single bin `[v, v]`.
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
    /// `Σ density · width = 1`. A degenerate histogram carries probability
    /// mass 1 instead, since its only bin has zero width.
    pub densities: Vec<f64>,
    pub degenerate: bool,
}

impl Histogram {
    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn integral(&self) -> f64 {
        if self.degenerate {
            return self.densities.iter().sum();
        }
        self.densities
            .iter()
            .zip(self.edges.windows(2))
            .map(|(d, e)| d * (e[1] - e[0]))
            .sum()
    }
}

/// Density of node independency (`1/N_l`) over `bins` log-spaced bins
/// spanning the data range.
pub fn independency_pdf(values: &[f64], bins: usize) -> Result<Histogram> {
    if values.is_empty() {
        return Err(Error::Empty("no values to histogram".into()));
    }
    if bins < 2 {
        return Err(Error::Invalid(format!("histogram needs at least 2 bins, got {bins}")));
    }
    if let Some(v) = values.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
        return Err(Error::Invalid(format!(
            "logarithmic bins need positive finite values, found {v}"
        )));
    }
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if lo == hi {
        return Ok(Histogram {
            edges: vec![lo, hi],
            counts: vec![values.len()],
            densities: vec![1.0],
            degenerate: true,
        });
    }
    let log_span = (hi / lo).ln();
    let mut edges: Vec<f64> = (0..=bins)
        .map(|b| lo * (log_span * b as f64 / bins as f64).exp())
        .collect();
    edges[0] = lo;
    edges[bins] = hi;
    let mut counts = vec![0usize; bins];
    for &v in values {
        let pos = (bins as f64 * (v / lo).ln() / log_span).floor() as usize;
        counts[pos.min(bins - 1)] += 1;
    }
    let total = values.len() as f64;
    let densities = counts
        .iter()
        .zip(edges.windows(2))
        .map(|(&c, e)| c as f64 / (total * (e[1] - e[0])))
        .collect();
    Ok(Histogram {
        edges,
        counts,
        densities,
        degenerate: false,
    })
}
