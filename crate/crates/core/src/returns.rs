//! Log returns and their per-asset standardization.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::PricePanel;
use crate::matrix::Matrix;

/// Normalized returns: each row has zero mean and unit population
/// standard deviation. `mean` and `std` describe the raw returns, so the
/// raw series is `std[i] * returns[i] + mean[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReturnPanel {
    labels: Vec<String>,
    returns: Matrix,
    mean: Vec<f64>,
    std: Vec<f64>,
}

impl ReturnPanel {
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn returns(&self) -> &Matrix {
        &self.returns
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn std(&self) -> &[f64] {
        &self.std
    }

    pub fn n_assets(&self) -> usize {
        self.returns.rows()
    }

    pub fn n_obs(&self) -> usize {
        self.returns.cols()
    }

    pub fn from_prices(panel: &PricePanel) -> Result<Self> {
        normalize(panel.labels().to_vec(), &log_returns(panel))
    }

    /// Reorders assets so that row `i` of the result is row `order[i]`.
    pub fn permute(&self, order: &[usize]) -> ReturnPanel {
        let rows: Vec<Vec<f64>> = order.iter().map(|&i| self.returns.row(i).to_vec()).collect();
        ReturnPanel {
            labels: order.iter().map(|&i| self.labels[i].clone()).collect(),
            returns: Matrix::from_rows(&rows).expect("rows share a length"),
            mean: order.iter().map(|&i| self.mean[i]).collect(),
            std: order.iter().map(|&i| self.std[i]).collect(),
        }
    }
}

/// `R_i(t) = ln P_i(t+1) - ln P_i(t)` over consecutive panel dates.
pub fn log_returns(panel: &PricePanel) -> Matrix {
    let prices = panel.prices();
    let t = prices.cols() - 1;
    let mut out = Matrix::zeros(prices.rows(), t);
    for i in 0..prices.rows() {
        let logs: Vec<f64> = prices.row(i).iter().map(|p| p.ln()).collect();
        for (o, w) in out.row_mut(i).iter_mut().zip(logs.windows(2)) {
            *o = w[1] - w[0];
        }
    }
    out
}

/// Standardizes each row of `raw` to zero mean and unit population variance.
pub fn normalize(labels: Vec<String>, raw: &Matrix) -> Result<ReturnPanel> {
    if labels.len() != raw.rows() {
        return Err(Error::DimensionMismatch {
            expected: raw.rows(),
            found: labels.len(),
        });
    }
    if raw.cols() < 2 {
        return Err(Error::InsufficientOverlap { found: raw.cols() + 1 });
    }
    let t = raw.cols() as f64;
    let mut returns = Matrix::zeros(raw.rows(), raw.cols());
    let mut mean = Vec::with_capacity(raw.rows());
    let mut std = Vec::with_capacity(raw.rows());
    for (i, label) in labels.iter().enumerate() {
        let row = raw.row(i);
        if row.iter().any(|x| !x.is_finite()) {
            return Err(Error::Invalid(format!("asset '{label}' has non-finite returns")));
        }
        let mu = row.iter().sum::<f64>() / t;
        let var = row.iter().map(|x| (x - mu) * (x - mu)).sum::<f64>() / t;
        let sigma = var.sqrt();
        // a constant row can leave rounding residue of order eps * |mu|
        if sigma.is_nan() || sigma <= 4.0 * f64::EPSILON * mu.abs() {
            return Err(Error::ZeroVariance(label.clone()));
        }
        for (o, x) in returns.row_mut(i).iter_mut().zip(row) {
            *o = (x - mu) / sigma;
        }
        mean.push(mu);
        std.push(sigma);
    }
    Ok(ReturnPanel {
        labels,
        returns,
        mean,
        std,
    })
}
