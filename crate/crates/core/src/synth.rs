//! Seeded synthetic markets with known correlation structure.

use chrono::{Days, NaiveDate};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::PricePanel;
use crate::matrix::Matrix;
use crate::returns::{normalize, ReturnPanel};

/// A group of assets sharing one common factor with loading `gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Block {
    pub size: usize,
    pub gamma: f64,
}

/// One-factor model `r_i = √γ f + √(1 − γ) ε_i`, optionally split into
/// independent blocks each with its own factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorSpec {
    pub n_assets: usize,
    pub n_obs: usize,
    pub gamma: f64,
    pub blocks: Option<Vec<Block>>,
    pub seed: u64,
}

impl FactorSpec {
    pub fn one_factor(n_assets: usize, n_obs: usize, gamma: f64, seed: u64) -> Self {
        FactorSpec {
            n_assets,
            n_obs,
            gamma,
            blocks: None,
            seed,
        }
    }

    pub fn with_blocks(n_obs: usize, blocks: Vec<Block>, seed: u64) -> Self {
        FactorSpec {
            n_assets: blocks.iter().map(|b| b.size).sum(),
            n_obs,
            gamma: 0.0,
            blocks: Some(blocks),
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_assets < 1 {
            return Err(Error::Invalid("synthetic market needs at least one asset".into()));
        }
        if self.n_obs < 2 {
            return Err(Error::Invalid("synthetic market needs at least 2 observations".into()));
        }
        check_gamma(self.gamma)?;
        if let Some(blocks) = &self.blocks {
            let total: usize = blocks.iter().map(|b| b.size).sum();
            if total != self.n_assets {
                return Err(Error::Invalid(format!(
                    "block sizes sum to {total} but the market has {} assets",
                    self.n_assets
                )));
            }
            for b in blocks {
                if b.size == 0 {
                    return Err(Error::Invalid("blocks must not be empty".into()));
                }
                check_gamma(b.gamma)?;
            }
        }
        Ok(())
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if (0.0..=1.0).contains(&gamma) {
        Ok(())
    } else {
        Err(Error::Invalid(format!("factor loading {gamma} must lie in [0, 1]")))
    }
}

pub fn asset_labels(n: usize) -> Vec<String> {
    let width = n.saturating_sub(1).to_string().len().max(2);
    (0..n).map(|i| format!("S{i:0width$}")).collect()
}

/// Draws the factor, then each asset's noise, in that order.
fn fill_block(rng: &mut ChaCha8Rng, rows: &mut [Vec<f64>], n_obs: usize, gamma: f64) {
    let factor: Vec<f64> = (0..n_obs).map(|_| StandardNormal.sample(rng)).collect();
    let (a, b) = (gamma.sqrt(), (1.0 - gamma).sqrt());
    for row in rows.iter_mut() {
        *row = factor
            .iter()
            .map(|f| {
                let eps: f64 = StandardNormal.sample(rng);
                a * f + b * eps
            })
            .collect();
    }
}

fn finish(spec: &FactorSpec, rows: Vec<Vec<f64>>) -> Result<ReturnPanel> {
    normalize(asset_labels(spec.n_assets), &Matrix::from_rows(&rows)?)
}

pub fn generate_one_factor(spec: &FactorSpec) -> Result<ReturnPanel> {
    spec.validate()?;
    if spec.blocks.is_some() {
        return Err(Error::Invalid("one-factor generation takes no blocks".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut rows = vec![Vec::new(); spec.n_assets];
    fill_block(&mut rng, &mut rows, spec.n_obs, spec.gamma);
    finish(spec, rows)
}

/// Independent one-factor blocks concatenated in order.
pub fn generate_blocks(spec: &FactorSpec) -> Result<ReturnPanel> {
    spec.validate()?;
    let blocks = spec
        .blocks
        .as_ref()
        .ok_or_else(|| Error::Invalid("block generation needs a block list".into()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut rows = vec![Vec::new(); spec.n_assets];
    let mut start = 0;
    for b in blocks {
        fill_block(&mut rng, &mut rows[start..start + b.size], spec.n_obs, b.gamma);
        start += b.size;
    }
    finish(spec, rows)
}

pub fn generate(spec: &FactorSpec) -> Result<ReturnPanel> {
    if spec.blocks.is_some() {
        generate_blocks(spec)
    } else {
        generate_one_factor(spec)
    }
}

/// First date of synthetic price panels.
pub fn synthetic_start_date() -> NaiveDate {
    NaiveDate::from_ymd_opt(2000, 1, 3).expect("valid date")
}

/// Turns returns into prices `P(t+1) = P(t) exp(volatility · r(t))`,
/// starting at `initial` on consecutive calendar days.
pub fn to_prices(rp: &ReturnPanel, initial: f64, volatility: f64) -> Result<PricePanel> {
    let (n, t) = (rp.n_assets(), rp.n_obs());
    let start = synthetic_start_date();
    let dates = (0..=t as u64).map(|k| start + Days::new(k)).collect();
    let mut prices = Matrix::zeros(n, t + 1);
    for i in 0..n {
        let row = prices.row_mut(i);
        row[0] = initial;
        let mut log_p = initial.ln();
        for (k, r) in rp.returns().row(i).iter().enumerate() {
            log_p += volatility * r;
            row[k + 1] = log_p.exp();
        }
    }
    PricePanel::new(rp.labels().to_vec(), dates, prices)
}
