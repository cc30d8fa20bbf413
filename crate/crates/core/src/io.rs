//! File formats: CSV tables, JSON documents and Newick dendrograms.
//!
//! Floats are written with Rust's shortest round-trip representation, so
//! reading a file back reproduces the in-memory values exactly.

use std::fmt::Write as _;
use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::clustering::{ClusterTree, CommunityAssignment, Heatmap};
use crate::correlation::CorrelationMatrix;
use crate::error::{Error, Result};
use crate::ingest::PricePanel;
use crate::matrix::Matrix;
use crate::participation::{CollectiveReport, Histogram, NullStatistics};

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn push_row<I, S>(out: &mut String, fields: I)
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut first = true;
    for f in fields {
        if !first {
            out.push(',');
        }
        first = false;
        out.push_str(&csv_field(f.as_ref()));
    }
    out.push('\n');
}

/// Wide price CSV: `date,LABEL1,LABEL2,...`.
pub fn price_panel_csv(panel: &PricePanel) -> String {
    let mut out = String::new();
    push_row(&mut out, std::iter::once("date").chain(panel.labels().iter().map(String::as_str)));
    for (t, date) in panel.dates().iter().enumerate() {
        let cells = (0..panel.n_assets()).map(|i| panel.prices()[(i, t)].to_string());
        push_row(&mut out, std::iter::once(date.to_string()).chain(cells));
    }
    out
}

/// Square labelled matrix: header `label,L1,...`, then one row per asset.
pub fn labelled_matrix_csv(labels: &[String], m: &Matrix) -> String {
    let mut out = String::new();
    push_row(&mut out, std::iter::once("label").chain(labels.iter().map(String::as_str)));
    for (i, label) in labels.iter().enumerate() {
        push_row(
            &mut out,
            std::iter::once(label.clone()).chain(m.row(i).iter().map(f64::to_string)),
        );
    }
    out
}

pub fn correlation_csv(c: &CorrelationMatrix) -> String {
    labelled_matrix_csv(c.labels(), c.entries())
}

pub fn read_labelled_matrix_csv<R: Read>(reader: R) -> Result<(Vec<String>, Matrix)> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = rdr.headers()?.clone();
    let labels: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    if labels.is_empty() {
        return Err(Error::Empty("matrix CSV has no columns".into()));
    }
    let mut rows = Vec::with_capacity(labels.len());
    for (i, record) in rdr.records().enumerate() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if i >= labels.len() {
            return Err(Error::Parse {
                line,
                message: format!("more rows than the {} header columns", labels.len()),
            });
        }
        if record[0] != *labels[i] {
            return Err(Error::Parse {
                line,
                message: format!("row label '{}' does not match column '{}'", &record[0], labels[i]),
            });
        }
        let row = record
            .iter()
            .skip(1)
            .map(|cell| {
                cell.parse::<f64>().map_err(|_| Error::Parse {
                    line,
                    message: format!("'{cell}' is not a number"),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    if rows.len() != labels.len() {
        return Err(Error::Parse {
            line: rows.len() + 1,
            message: format!("expected {} rows, found {}", labels.len(), rows.len()),
        });
    }
    Ok((labels, Matrix::from_rows(&rows)?))
}

pub fn read_correlation_csv<R: Read>(reader: R) -> Result<CorrelationMatrix> {
    let (labels, m) = read_labelled_matrix_csv(reader)?;
    CorrelationMatrix::new(labels, m)
}

#[derive(Debug, Serialize, Deserialize)]
struct CorrelationDoc {
    labels: Vec<String>,
    matrix: Vec<Vec<f64>>,
}

pub fn correlation_json(c: &CorrelationMatrix) -> Result<String> {
    let doc = CorrelationDoc {
        labels: c.labels().to_vec(),
        matrix: (0..c.n()).map(|i| c.entries().row(i).to_vec()).collect(),
    };
    Ok(serde_json::to_string_pretty(&doc)?)
}

pub fn read_correlation_json(text: &str) -> Result<CorrelationMatrix> {
    let doc: CorrelationDoc = serde_json::from_str(text)?;
    CorrelationMatrix::new(doc.labels, Matrix::from_rows(&doc.matrix)?)
}

pub fn report_json(report: &CollectiveReport) -> Result<String> {
    Ok(serde_json::to_string_pretty(report)? + "\n")
}

pub fn read_report_json(text: &str) -> Result<CollectiveReport> {
    Ok(serde_json::from_str(text)?)
}

/// `k,lambda,pr,pr_normalized,pr_shuffled_mean`, one row per eigenvector
/// in descending eigenvalue order (`k` starts at 1).
pub fn pr_csv(report: &CollectiveReport, null: &NullStatistics) -> String {
    let mut out = String::from("k,lambda,pr,pr_normalized,pr_shuffled_mean\n");
    for k in 0..report.pr.len() {
        push_row(
            &mut out,
            [
                (k + 1).to_string(),
                report.lambda[k].to_string(),
                report.pr[k].to_string(),
                report.pr_normalized[k].to_string(),
                null.mean_pr[k].to_string(),
            ],
        );
    }
    out
}

/// `label,npr,independency,shuffled_npr_mean`, sorted by ascending NPR. The
/// shuffled column is the rank-wise mean of the sorted shuffled NPRs.
pub fn npr_csv(report: &CollectiveReport, null: &NullStatistics) -> String {
    let mut order: Vec<usize> = (0..report.npr.len()).collect();
    order.sort_by(|&a, &b| report.npr[a].total_cmp(&report.npr[b]).then(a.cmp(&b)));
    let mut out = String::from("label,npr,independency,shuffled_npr_mean\n");
    for (rank, &l) in order.iter().enumerate() {
        push_row(
            &mut out,
            [
                report.labels[l].clone(),
                report.npr[l].to_string(),
                report.independency[l].to_string(),
                null.mean_sorted_npr[rank].to_string(),
            ],
        );
    }
    out
}

/// `bin_left,bin_right,density`.
pub fn histogram_csv(h: &Histogram) -> String {
    let mut out = String::from("bin_left,bin_right,density\n");
    for (b, d) in h.densities.iter().enumerate() {
        push_row(&mut out, [h.edges[b].to_string(), h.edges[b + 1].to_string(), d.to_string()]);
    }
    out
}

pub fn read_histogram_csv<R: Read>(reader: R) -> Result<Vec<(f64, f64, f64)>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let mut out = Vec::new();
    for record in rdr.deserialize() {
        out.push(record?);
    }
    Ok(out)
}

/// `label,community_id`.
pub fn communities_csv(a: &CommunityAssignment) -> String {
    let mut out = String::from("label,community_id\n");
    for (label, c) in a.labels.iter().zip(&a.community) {
        push_row(&mut out, [label.clone(), c.to_string()]);
    }
    out
}

pub fn read_communities_csv<R: Read>(reader: R) -> Result<Vec<(String, i64)>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let mut out = Vec::new();
    for record in rdr.deserialize() {
        out.push(record?);
    }
    Ok(out)
}

pub fn dendrogram_json(tree: &ClusterTree) -> Result<String> {
    Ok(serde_json::to_string_pretty(tree)? + "\n")
}

pub fn heatmap_csv(h: &Heatmap) -> String {
    labelled_matrix_csv(&h.labels, &h.matrix)
}

#[derive(Debug, Serialize, Deserialize)]
pub struct HeatmapSidecar {
    pub labels: Vec<String>,
    pub leaf_order: Vec<usize>,
}

pub fn heatmap_sidecar_json(h: &Heatmap) -> Result<String> {
    let sidecar = HeatmapSidecar {
        labels: h.labels.clone(),
        leaf_order: h.leaf_order.clone(),
    };
    Ok(serde_json::to_string_pretty(&sidecar)? + "\n")
}

fn newick_label(label: &str) -> String {
    if label.is_empty() || label.contains(|c: char| "()[]':;, \t\n".contains(c)) {
        format!("'{}'", label.replace('\'', "''"))
    } else {
        label.to_string()
    }
}

/// Rooted Newick tree whose branch lengths are height differences between
/// a node and its parent (leaves sit at height zero).
pub fn newick(tree: &ClusterTree) -> String {
    fn node(tree: &ClusterTree, id: usize, out: &mut String) {
        match tree.children(id) {
            None => out.push_str(&newick_label(&tree.labels[id])),
            Some((a, b)) => {
                let (first, second) = if (tree.size(b), b) < (tree.size(a), a) { (b, a) } else { (a, b) };
                out.push('(');
                for (i, child) in [first, second].into_iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    node(tree, child, out);
                    let length = tree.height(id) - tree.height(child);
                    let _ = write!(out, ":{length}");
                }
                out.push(')');
            }
        }
    }
    let mut out = String::new();
    if tree.n_leaves() > 0 {
        node(tree, tree.root(), &mut out);
    }
    out.push_str(";\n");
    out
}
