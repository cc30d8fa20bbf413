#![allow(dead_code)]

//! Reference computations that share no code path with the library's
//! eigensolver or ratio routines.

use collective::{CorrelationMatrix, Matrix};
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn to_na(m: &Matrix) -> DMatrix<f64> {
    DMatrix::from_row_slice(m.rows(), m.cols(), m.as_slice())
}

/// Eigenvalues (descending) and eigenvectors (columns) from nalgebra.
pub fn reference_eigen(m: &Matrix) -> (Vec<f64>, DMatrix<f64>) {
    let eig = nalgebra::SymmetricEigen::new(to_na(m));
    let mut idx: Vec<usize> = (0..m.rows()).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(m.rows(), m.rows(), |r, c| eig.eigenvectors[(r, idx[c])]);
    (values, vectors)
}

pub fn reference_mean_pr(m: &Matrix) -> f64 {
    let (_, u) = reference_eigen(m);
    let n = m.rows();
    let mut total = 0.0;
    for k in 0..n {
        let mut s = 0.0;
        for l in 0..n {
            s += u[(l, k)] * u[(l, k)] * u[(l, k)] * u[(l, k)];
        }
        total += 1.0 / s;
    }
    total / n as f64
}

/// Pearson correlation of raw Gaussian samples, computed directly.
pub fn random_correlation(n: usize, t: usize, seed: u64) -> CorrelationMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..t).map(|_| StandardNormal.sample(&mut rng)).collect())
        .collect();
    let centered: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| {
            let mu = r.iter().sum::<f64>() / t as f64;
            r.iter().map(|x| x - mu).collect()
        })
        .collect();
    let norms: Vec<f64> = centered.iter().map(|r| r.iter().map(|x| x * x).sum::<f64>().sqrt()).collect();
    let m = Matrix::from_fn(n, n, |i, j| {
        if i == j {
            1.0
        } else {
            let dot: f64 = centered[i].iter().zip(&centered[j]).map(|(a, b)| a * b).sum();
            dot / (norms[i] * norms[j])
        }
    });
    let labels = (0..n).map(|i| format!("r{i}")).collect();
    CorrelationMatrix::new(labels, m).unwrap()
}

pub fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("L{i}")).collect()
}
