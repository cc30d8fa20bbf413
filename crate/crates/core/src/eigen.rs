//! Dense symmetric eigensolver: Householder reduction to tridiagonal form
//! followed by the implicit QL algorithm with Wilkinson-style shifts.
//!
//! Both phases keep the eigenvector matrix transposed (one eigenvector per
//! row) so that every inner loop walks contiguous memory.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// QL sweeps allowed per eigenvalue before giving up.
const MAX_QL_ITERATIONS: usize = 100;

/// Eigenvalues in descending order with their orthonormal eigenvectors.
///
/// Each eigenvector's sign is fixed so that its largest-magnitude component
/// (the first one, on ties) is positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenSystem {
    values: Vec<f64>,
    /// Row `k` holds `u_k`.
    vectors: Matrix,
}

impl EigenSystem {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.values
    }

    pub fn eigenvector(&self, k: usize) -> &[f64] {
        self.vectors.row(k)
    }

    /// Eigenvectors as rows: entry `(k, l)` is component `l` of `u_k`.
    pub fn eigenvector_rows(&self) -> &Matrix {
        &self.vectors
    }

    /// Eigenvector matrix `U` with column `k` equal to `u_k`.
    pub fn eigenvectors(&self) -> Matrix {
        self.vectors.transpose()
    }

    /// `U diag(λ) Uᵀ`.
    pub fn reconstruct(&self) -> Matrix {
        let n = self.len();
        let mut out = Matrix::zeros(n, n);
        for (k, &lambda) in self.values.iter().enumerate() {
            let u = self.vectors.row(k);
            for i in 0..n {
                let a = lambda * u[i];
                for (o, &b) in out.row_mut(i).iter_mut().zip(u) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// Largest `|u_j · u_k - δ_jk|`.
    pub fn orthonormality_error(&self) -> f64 {
        let n = self.len();
        let mut worst: f64 = 0.0;
        for j in 0..n {
            for k in j..n {
                let dot: f64 = self.vectors.row(j).iter().zip(self.vectors.row(k)).map(|(a, b)| a * b).sum();
                let target = if j == k { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }

    /// Largest `‖A u_k − λ_k u_k‖₂` over all eigenpairs.
    pub fn max_residual(&self, a: &Matrix) -> f64 {
        let n = self.len();
        (0..n)
            .map(|k| {
                let u = self.vectors.row(k);
                (0..n)
                    .map(|i| {
                        let au: f64 = a.row(i).iter().zip(u).map(|(x, y)| x * y).sum();
                        let r = au - self.values[k] * u[i];
                        r * r
                    })
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }
}

/// Diagonalizes a real symmetric matrix.
pub fn symmetric_eigen(a: &Matrix) -> Result<EigenSystem> {
    if !a.is_square() {
        return Err(Error::Invalid(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    if n == 0 {
        return Ok(EigenSystem {
            values: Vec::new(),
            vectors: Matrix::zeros(0, 0),
        });
    }
    if a.as_slice().iter().any(|x| !x.is_finite()) {
        return Err(Error::Invalid("matrix has non-finite entries".into()));
    }
    let scale = a.as_slice().iter().fold(1.0f64, |m, x| m.max(x.abs()));
    if a.max_asymmetry() > 1e-10 * scale {
        return Err(Error::Invalid("matrix is not symmetric".into()));
    }

    // w[c * n + r] holds V[r][c]; A is symmetric so the initial copy is A itself.
    let mut w = a.as_slice().to_vec();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tridiagonalize(n, &mut w, &mut d, &mut e);
    ql_implicit(n, &mut w, &mut d, &mut e)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[j].total_cmp(&d[i]).then(i.cmp(&j)));
    let mut vectors = Matrix::zeros(n, n);
    let mut values = Vec::with_capacity(n);
    for (k, &src) in order.iter().enumerate() {
        values.push(d[src]);
        let row = vectors.row_mut(k);
        row.copy_from_slice(&w[src * n..(src + 1) * n]);
        let mut pivot = 0;
        for (l, x) in row.iter().enumerate() {
            if x.abs() > row[pivot].abs() {
                pivot = l;
            }
        }
        if row[pivot] < 0.0 {
            row.iter_mut().for_each(|x| *x = -*x);
        }
    }
    Ok(EigenSystem { values, vectors })
}

/// Householder reduction (EISPACK `tred2`). On return `d` holds the
/// diagonal, `e[1..]` the subdiagonal, and `w` the accumulated
/// orthogonal transform (transposed).
fn tridiagonalize(n: usize, w: &mut [f64], d: &mut [f64], e: &mut [f64]) {
    // V[r][c] == w[c * n + r]
    let idx = |r: usize, c: usize| c * n + r;

    for j in 0..n {
        d[j] = w[idx(n - 1, j)];
    }

    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for x in &d[..i] {
            scale += x.abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = w[idx(i - 1, j)];
                w[idx(i, j)] = 0.0;
                w[idx(j, i)] = 0.0;
            }
        } else {
            for x in &mut d[..i] {
                *x /= scale;
                h += *x * *x;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            e[..i].fill(0.0);

            for j in 0..i {
                f = d[j];
                w[idx(j, i)] = f;
                g = e[j] + w[idx(j, j)] * f;
                let col = &w[j * n..j * n + i];
                for k in (j + 1)..i {
                    g += col[k] * d[k];
                    e[k] += col[k] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                let col = &mut w[j * n..j * n + i];
                for k in j..i {
                    col[k] -= f * e[k] + g * d[k];
                }
                d[j] = w[idx(i - 1, j)];
                w[idx(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }

    // accumulate transformations
    for i in 0..n - 1 {
        w[idx(n - 1, i)] = w[idx(i, i)];
        w[idx(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = w[idx(k, i + 1)] / h;
            }
            for j in 0..=i {
                let (lo, hi) = w.split_at_mut((i + 1) * n);
                let next = &hi[..=i];
                let col = &mut lo[j * n..=j * n + i];
                let g: f64 = next.iter().zip(col.iter()).map(|(a, b)| a * b).sum();
                for (c, dk) in col.iter_mut().zip(&d[..=i]) {
                    *c -= g * dk;
                }
            }
        }
        for k in 0..=i {
            w[idx(k, i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = w[idx(n - 1, j)];
        w[idx(n - 1, j)] = 0.0;
    }
    w[idx(n - 1, n - 1)] = 1.0;
    e[0] = 0.0;
}

/// Implicit QL iteration on the tridiagonal matrix (EISPACK `tql2`).
fn ql_implicit(n: usize, w: &mut [f64], d: &mut [f64], e: &mut [f64]) -> Result<()> {
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > MAX_QL_ITERATIONS {
                    return Err(Error::NoConvergence { residual: e[l].abs() });
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let h = g - d[l];
                for x in &mut d[l + 2..] {
                    *x -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    let h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);

                    let (lo, hi) = w.split_at_mut((i + 1) * n);
                    let vi = &mut lo[i * n..];
                    let vi1 = &mut hi[..n];
                    for (a, b) in vi.iter_mut().zip(vi1.iter_mut()) {
                        let h = *b;
                        *b = s * *a + c * h;
                        *a = c * *a - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}
