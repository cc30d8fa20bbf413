//! Hierarchical clustering of assets under the correlation distance
//! `d = √(2(1 − C))`, dendrogram cuts at a correlation threshold, and
//! dendrogram-ordered heatmaps.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::correlation::CorrelationMatrix;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Symmetric, zero-diagonal, non-negative dissimilarities between labelled assets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceMatrix {
    labels: Vec<String>,
    entries: Matrix,
}

impl DistanceMatrix {
    pub fn new(labels: Vec<String>, entries: Matrix) -> Result<Self> {
        let n = entries.rows();
        if !entries.is_square() || labels.len() != n {
            return Err(Error::Invalid(format!(
                "distance matrix is {}x{} with {} labels",
                n,
                entries.cols(),
                labels.len()
            )));
        }
        if n == 0 {
            return Err(Error::Empty("distance matrix has no assets".into()));
        }
        for i in 0..n {
            if entries[(i, i)] != 0.0 {
                return Err(Error::Invalid(format!("distance of '{}' to itself is not zero", labels[i])));
            }
            for j in (i + 1)..n {
                let d = entries[(i, j)];
                if !(d >= 0.0 && d.is_finite()) || d != entries[(j, i)] {
                    return Err(Error::Invalid(format!(
                        "invalid distance between '{}' and '{}'",
                        labels[i], labels[j]
                    )));
                }
            }
        }
        Ok(DistanceMatrix { labels, entries })
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
}

/// Maps a correlation to its distance `√(2(1 − ρ))`.
pub fn distance_from_correlation(rho: f64) -> f64 {
    (2.0 * (1.0 - rho)).max(0.0).sqrt()
}

pub fn correlation_distance(c: &CorrelationMatrix) -> DistanceMatrix {
    let n = c.n();
    let entries = Matrix::from_fn(n, n, |i, j| {
        if i == j {
            0.0
        } else {
            distance_from_correlation(c.get(i, j))
        }
    });
    DistanceMatrix {
        labels: c.labels().to_vec(),
        entries,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Linkage {
    #[default]
    Average,
    Single,
    Complete,
}

impl FromStr for Linkage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "average" => Ok(Linkage::Average),
            "single" => Ok(Linkage::Single),
            "complete" => Ok(Linkage::Complete),
            other => Err(Error::Invalid(format!(
                "unknown linkage '{other}' (expected average, single or complete)"
            ))),
        }
    }
}

/// One agglomeration step. Leaves are nodes `0..N`; the cluster created by
/// merge `s` is node `N + s`. `left < right` always.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub height: f64,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterTree {
    pub labels: Vec<String>,
    pub merges: Vec<Merge>,
    /// Leaves in drawing order (depth first, smaller subtree first).
    pub leaf_order: Vec<usize>,
}

impl ClusterTree {
    pub fn n_leaves(&self) -> usize {
        self.labels.len()
    }

    pub fn root(&self) -> usize {
        2 * self.n_leaves() - 2
    }

    /// Children of internal node `node`, or `None` for a leaf.
    pub fn children(&self, node: usize) -> Option<(usize, usize)> {
        let n = self.n_leaves();
        (node >= n).then(|| {
            let m = &self.merges[node - n];
            (m.left, m.right)
        })
    }

    /// Merge height of `node`; zero for leaves.
    pub fn height(&self, node: usize) -> f64 {
        let n = self.n_leaves();
        if node < n {
            0.0
        } else {
            self.merges[node - n].height
        }
    }

    pub fn size(&self, node: usize) -> usize {
        let n = self.n_leaves();
        if node < n {
            1
        } else {
            self.merges[node - n].size
        }
    }

    /// Children of `node` with the smaller subtree first (ties by node id).
    fn ordered_children(&self, node: usize) -> Option<(usize, usize)> {
        self.children(node).map(|(a, b)| {
            if (self.size(b), b) < (self.size(a), a) {
                (b, a)
            } else {
                (a, b)
            }
        })
    }

    /// Leaves under `node` in drawing order.
    pub fn leaves_under(&self, node: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![node];
        while let Some(x) = stack.pop() {
            match self.ordered_children(x) {
                Some((first, second)) => {
                    stack.push(second);
                    stack.push(first);
                }
                None => out.push(x),
            }
        }
        out
    }
}

/// Agglomerative clustering with Lance–Williams updates. At each step the
/// pair of clusters at minimal linkage distance merges; ties go to the
/// lexicographically smallest `(left id, right id)` pair.
pub fn agglomerate(d: &DistanceMatrix, linkage: Linkage) -> ClusterTree {
    let n = d.n();
    let mut dist = d.entries().as_slice().to_vec();
    let mut active: Vec<usize> = (0..n).collect();
    let mut node_of = (0..n).collect::<Vec<_>>();
    let mut size = vec![1usize; n];
    let mut merges = Vec::with_capacity(n.saturating_sub(1));

    for step in 0..n.saturating_sub(1) {
        let mut best: Option<(f64, usize, usize, usize, usize)> = None;
        for (ia, &a) in active.iter().enumerate() {
            for &b in &active[ia + 1..] {
                let h = dist[a * n + b];
                let (lo, hi) = if node_of[a] < node_of[b] {
                    (node_of[a], node_of[b])
                } else {
                    (node_of[b], node_of[a])
                };
                let better = match best {
                    None => true,
                    Some((bh, blo, bhi, _, _)) => h < bh || (h == bh && (lo, hi) < (blo, bhi)),
                };
                if better {
                    best = Some((h, lo, hi, a, b));
                }
            }
        }
        let (height, left, right, a, b) = best.expect("at least two active clusters");
        let (na, nb) = (size[a] as f64, size[b] as f64);
        for &k in &active {
            if k == a || k == b {
                continue;
            }
            let (dka, dkb) = (dist[k * n + a], dist[k * n + b]);
            let merged = match linkage {
                Linkage::Single => dka.min(dkb),
                Linkage::Complete => dka.max(dkb),
                // a convex combination; the clamp only removes rounding
                Linkage::Average => ((na * dka + nb * dkb) / (na + nb)).clamp(dka.min(dkb), dka.max(dkb)),
            };
            dist[k * n + a] = merged;
            dist[a * n + k] = merged;
        }
        size[a] += size[b];
        node_of[a] = n + step;
        active.retain(|&x| x != b);
        merges.push(Merge {
            left,
            right,
            height,
            size: size[a],
        });
    }

    let mut tree = ClusterTree {
        labels: d.labels().to_vec(),
        merges,
        leaf_order: Vec::new(),
    };
    tree.leaf_order = if n == 0 { Vec::new() } else { tree.leaves_under(tree.root()) };
    tree
}

/// Cut height corresponding to a correlation threshold.
pub fn cut_height(threshold_corr: f64) -> f64 {
    distance_from_correlation(threshold_corr)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommunityAssignment {
    pub labels: Vec<String>,
    /// Community id per asset, or −1 for assets that joined no community.
    pub community: Vec<i64>,
    pub threshold_corr: f64,
}

impl CommunityAssignment {
    /// Member indices of each community, indexed by community id.
    pub fn groups(&self) -> Vec<Vec<usize>> {
        let count = self.community.iter().copied().max().map_or(0, |m| (m + 1).max(0) as usize);
        let mut groups = vec![Vec::new(); count];
        for (i, &c) in self.community.iter().enumerate() {
            if c >= 0 {
                groups[c as usize].push(i);
            }
        }
        groups
    }

    pub fn unclustered(&self) -> Vec<usize> {
        (0..self.community.len()).filter(|&i| self.community[i] < 0).collect()
    }
}

/// Communities are maximal subtrees whose merges all lie strictly below the
/// cut height `√(2(1 − threshold_corr))`. Single assets are left unclustered.
/// Ids are numbered in leaf drawing order.
pub fn cut_at_correlation(tree: &ClusterTree, threshold_corr: f64) -> Result<CommunityAssignment> {
    if !(threshold_corr > -1.0 && threshold_corr < 1.0) {
        return Err(Error::Invalid(format!(
            "correlation threshold {threshold_corr} must lie in (-1, 1)"
        )));
    }
    let n = tree.n_leaves();
    let h_star = cut_height(threshold_corr);
    // highest merge inside each subtree; merges only reference earlier nodes
    let mut max_height = vec![0.0f64; 2 * n - 1];
    for (s, m) in tree.merges.iter().enumerate() {
        max_height[n + s] = m.height.max(max_height[m.left]).max(max_height[m.right]);
    }

    let mut community = vec![-1i64; n];
    let mut next_id = 0i64;
    let mut stack = vec![tree.root()];
    while let Some(node) = stack.pop() {
        if node < n {
            continue;
        }
        if max_height[node] < h_star {
            for leaf in tree.leaves_under(node) {
                community[leaf] = next_id;
            }
            next_id += 1;
        } else {
            let (first, second) = tree.ordered_children(node).expect("internal node");
            stack.push(second);
            stack.push(first);
        }
    }
    Ok(CommunityAssignment {
        labels: tree.labels.clone(),
        community,
        threshold_corr,
    })
}

/// Correlation matrix with rows and columns in dendrogram leaf order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Heatmap {
    pub labels: Vec<String>,
    pub leaf_order: Vec<usize>,
    pub matrix: Matrix,
}

pub fn reorder_heatmap(c: &CorrelationMatrix, tree: &ClusterTree) -> Result<Heatmap> {
    if c.n() != tree.n_leaves() {
        return Err(Error::DimensionMismatch {
            expected: c.n(),
            found: tree.n_leaves(),
        });
    }
    if c.labels() != tree.labels.as_slice() {
        return Err(Error::Invalid("tree and matrix have different asset labels".into()));
    }
    let permuted = c.permute(&tree.leaf_order)?;
    Ok(Heatmap {
        labels: permuted.labels().to_vec(),
        leaf_order: tree.leaf_order.clone(),
        matrix: permuted.entries().clone(),
    })
}
