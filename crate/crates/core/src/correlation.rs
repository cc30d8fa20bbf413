//! Equal-time cross-correlation matrices of normalized returns.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eigen::{symmetric_eigen, EigenSystem};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::returns::ReturnPanel;

const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// Symmetric matrix with unit diagonal and entries in `[-1, 1]`, labelled by asset.
///
/// Positive semi-definiteness is not enforced on construction: shuffled
/// null-model matrices share this type and are generally indefinite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    labels: Vec<String>,
    entries: Matrix,
}

impl CorrelationMatrix {
    /// Validates and canonicalizes `entries`: the diagonal is set to exactly
    /// one and the lower triangle mirrors the upper one.
    pub fn new(labels: Vec<String>, entries: Matrix) -> Result<Self> {
        let n = entries.rows();
        if !entries.is_square() {
            return Err(Error::Invalid(format!(
                "correlation matrix must be square, got {}x{}",
                n,
                entries.cols()
            )));
        }
        if labels.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: labels.len(),
            });
        }
        if n == 0 {
            return Err(Error::Empty("correlation matrix has no assets".into()));
        }
        let mut entries = entries;
        for i in 0..n {
            if (entries[(i, i)] - 1.0).abs() > SYMMETRY_TOLERANCE {
                return Err(Error::Invalid(format!(
                    "diagonal entry for '{}' is {}, expected 1",
                    labels[i],
                    entries[(i, i)]
                )));
            }
            entries[(i, i)] = 1.0;
            for j in (i + 1)..n {
                let (a, b) = (entries[(i, j)], entries[(j, i)]);
                if !a.is_finite() || !b.is_finite() {
                    return Err(Error::Invalid(format!(
                        "non-finite correlation between '{}' and '{}'",
                        labels[i], labels[j]
                    )));
                }
                if (a - b).abs() > SYMMETRY_TOLERANCE {
                    return Err(Error::Invalid(format!(
                        "matrix is not symmetric at ('{}', '{}')",
                        labels[i], labels[j]
                    )));
                }
                if a.abs() > 1.0 + SYMMETRY_TOLERANCE {
                    return Err(Error::Invalid(format!(
                        "correlation {a} between '{}' and '{}' lies outside [-1, 1]",
                        labels[i], labels[j]
                    )));
                }
                let a = a.clamp(-1.0, 1.0);
                entries[(i, j)] = a;
                entries[(j, i)] = a;
            }
        }
        Ok(CorrelationMatrix { labels, entries })
    }

    /// Builds a matrix from values already known to satisfy every invariant.
    pub(crate) fn from_parts_unchecked(labels: Vec<String>, entries: Matrix) -> Self {
        CorrelationMatrix { labels, entries }
    }

    /// `C_ij = rho` for `i != j`.
    pub fn equicorrelated(labels: Vec<String>, rho: f64) -> Result<Self> {
        let n = labels.len();
        CorrelationMatrix::new(labels, Matrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { rho }))
    }

    pub fn identity(labels: Vec<String>) -> Self {
        let n = labels.len();
        CorrelationMatrix {
            labels,
            entries: Matrix::identity(n),
        }
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn entries(&self) -> &Matrix {
        &self.entries
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)]
    }

    /// Row `i` of the result is asset `order[i]` of `self`.
    pub fn permute(&self, order: &[usize]) -> Result<CorrelationMatrix> {
        check_permutation(order, self.n())?;
        Ok(CorrelationMatrix {
            labels: order.iter().map(|&i| self.labels[i].clone()).collect(),
            entries: self.entries.permute_symmetric(order),
        })
    }

    /// Upper-triangle off-diagonal entries in row-major order.
    pub fn off_diagonal(&self) -> Vec<f64> {
        self.entries.upper_off_diagonal()
    }
}

pub(crate) fn check_permutation(order: &[usize], n: usize) -> Result<()> {
    if order.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: order.len(),
        });
    }
    let mut seen = vec![false; n];
    for &i in order {
        if i >= n || std::mem::replace(&mut seen[i], true) {
            return Err(Error::Invalid(format!("{order:?} is not a permutation of 0..{n}")));
        }
    }
    Ok(())
}

/// `C_ij = (1/T) Σ_t r_i(t) r_j(t)` over normalized returns.
pub fn correlate(rp: &ReturnPanel) -> CorrelationMatrix {
    let r = rp.returns();
    let n = r.rows();
    let t = r.cols() as f64;
    let upper: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let ri = r.row(i);
            ((i + 1)..n)
                .map(|j| {
                    let dot: f64 = ri.iter().zip(r.row(j)).map(|(a, b)| a * b).sum();
                    (dot / t).clamp(-1.0, 1.0)
                })
                .collect()
        })
        .collect();
    let mut entries = Matrix::identity(n);
    for (i, row) in upper.iter().enumerate() {
        for (off, &c) in row.iter().enumerate() {
            let j = i + 1 + off;
            entries[(i, j)] = c;
            entries[(j, i)] = c;
        }
    }
    CorrelationMatrix::from_parts_unchecked(rp.labels().to_vec(), entries)
}

pub fn eigendecompose(c: &CorrelationMatrix) -> Result<EigenSystem> {
    symmetric_eigen(c.entries())
}
