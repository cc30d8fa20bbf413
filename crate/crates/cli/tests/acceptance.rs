//! Acceptance suite. Each criterion prints one `PASS` or `FAIL` line; the test
//! fails if any criterion does. Run with `--nocapture` to see the lines.

use std::fs;
use std::time::{Duration, Instant};

use collective::clustering::cut_at_correlation;
use collective::nullmodel::make_ensemble;
use collective::participation::{mean, DEFAULT_HISTOGRAM_BINS};
use collective::synth::{asset_labels, generate};
use collective::{
    agglomerate, analyze, correlate, correlation_distance, eigendecompose, independency_pdf,
    node_participation_ratios, participation_ratios, relative_participation_ratio, Block, CorrelationMatrix,
    EigenSystem, FactorSpec, Linkage, Matrix,
};
use collective_cli::{run_pipeline, run_synth, RunConfig, SynthConfig};
use tempfile::TempDir;

const SUITE_SEED: u64 = 20_240_601;
const SUITE_SIZE: usize = 200;

struct Outcome {
    id: &'static str,
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(id: &'static str, pass: bool, detail: String) -> Self {
        let tag = if pass { "PASS" } else { "FAIL" };
        println!("{tag} [{id}] {detail}");
        Outcome { id, pass, detail }
    }
}

/// The shared 200-matrix suite: seeded Gaussian factor panels with N in 5..=60
/// and T both below and above N.
fn suite() -> Vec<CorrelationMatrix> {
    (0..SUITE_SIZE)
        .map(|k| {
            let n = 5 + k % 56;
            let t = match k % 3 {
                0 => n / 2 + 3,
                1 => 2 * n,
                _ => 500,
            };
            let gamma = [0.0, 0.3, 0.6, 0.9][k % 4];
            let spec = FactorSpec::one_factor(n, t, gamma, SUITE_SEED + k as u64);
            correlate(&generate(&spec).unwrap())
        })
        .collect()
}

fn bounds_and_duality() -> Outcome {
    let start = Instant::now();
    let mut worst_bound = 0.0f64;
    let mut worst_duality = 0.0f64;
    let mut out_of_range = 0usize;
    for c in suite() {
        let es = eigendecompose(&c).unwrap();
        let n = c.n() as f64;
        let p = participation_ratios(&es);
        let npr = node_participation_ratios(&es);
        for &v in p.iter().chain(&npr) {
            // rounding can push a fully localized vector a few ulps below 1
            let excess = (1.0 - v).max(v - n).max(0.0);
            worst_bound = worst_bound.max(excess);
            if excess > 1e-12 * n {
                out_of_range += 1;
            }
        }
        let lhs: f64 = p.iter().map(|v| 1.0 / v).sum();
        let rhs: f64 = npr.iter().map(|v| 1.0 / v).sum();
        worst_duality = worst_duality.max((lhs - rhs).abs());
    }
    let elapsed = start.elapsed();
    Outcome::new(
        "1 bounds",
        out_of_range == 0 && worst_duality <= 1e-10 && elapsed < Duration::from_secs(30),
        format!(
            "{SUITE_SIZE} matrices: out-of-range P/NPR = {out_of_range} (worst excess {worst_bound:.1e}), \
             max |ΣP⁻¹ − ΣN⁻¹| = {worst_duality:.2e} (≤ 1e-10), {:.2} s (< 30 s)",
            elapsed.as_secs_f64()
        ),
    )
}

fn eigen_contract() -> Outcome {
    let mut recon = 0.0f64;
    let mut ortho = 0.0f64;
    let mut trace = 0.0f64;
    for c in suite() {
        let es: EigenSystem = eigendecompose(&c).unwrap();
        let r = es.reconstruct();
        let diff = Matrix::from_fn(c.n(), c.n(), |i, j| r[(i, j)] - c.get(i, j));
        recon = recon.max(diff.frobenius_norm());
        ortho = ortho.max(es.orthonormality_error());
        trace = trace.max((es.eigenvalues().iter().sum::<f64>() - c.n() as f64).abs());
    }
    Outcome::new(
        "2 eigen",
        recon <= 1e-9 && ortho <= 1e-10 && trace <= 1e-8,
        format!(
            "max ‖UΛUᵀ − C‖_F = {recon:.2e} (≤ 1e-9), orthonormality {ortho:.2e} (≤ 1e-10), \
             |Σλ − N| = {trace:.2e} (≤ 1e-8)"
        ),
    )
}

fn shuffle_conservation() -> Outcome {
    const MEMBERS: usize = 5;
    let mut multiset_failures = 0usize;
    let mut worst_sum = 0.0f64;
    let mut worst_sq = 0.0f64;
    let mut checked = 0usize;
    for (k, c) in suite().iter().enumerate() {
        let base = eigendecompose(c).unwrap();
        let s1: f64 = base.eigenvalues().iter().sum();
        let s2: f64 = base.eigenvalues().iter().map(|l| l * l).sum();
        let mut want = c.off_diagonal();
        want.sort_by(f64::total_cmp);
        let ensemble = make_ensemble(c, MEMBERS, k as u64).unwrap();
        for member in &ensemble.members {
            let mut got = member.off_diagonal();
            got.sort_by(f64::total_cmp);
            if got.iter().map(|v| v.to_bits()).ne(want.iter().map(|v| v.to_bits())) {
                multiset_failures += 1;
            }
            let es = eigendecompose(member).unwrap();
            worst_sum = worst_sum.max((es.eigenvalues().iter().sum::<f64>() - s1).abs());
            worst_sq = worst_sq.max((es.eigenvalues().iter().map(|l| l * l).sum::<f64>() - s2).abs());
            checked += 1;
        }
    }
    Outcome::new(
        "3 shuffle",
        multiset_failures == 0 && worst_sum <= 1e-8 && worst_sq <= 1e-8,
        format!(
            "{checked} members: multiset mismatches = {multiset_failures}, max |ΔΣλ| = {worst_sum:.2e}, \
             max |ΔΣλ²| = {worst_sq:.2e} (≤ 1e-8)"
        ),
    )
}

fn exact_zero_delta() -> Outcome {
    let mut cases: Vec<(String, CorrelationMatrix)> = Vec::new();
    for n in [2, 5, 17, 40] {
        cases.push((format!("identity N={n}"), CorrelationMatrix::identity(asset_labels(n))));
    }
    for rho in [-0.9, -0.3, 0.0, 0.25, 0.7, 0.99] {
        let c = CorrelationMatrix::new(
            asset_labels(2),
            Matrix::from_rows(&[vec![1.0, rho], vec![rho, 1.0]]).unwrap(),
        )
        .unwrap();
        cases.push((format!("2x2 ρ={rho}"), c));
    }
    for (n, rho) in [(3, 0.4), (10, 0.2), (25, 0.6), (40, -0.02), (60, 0.95)] {
        cases.push((
            format!("equicorrelated N={n} ρ={rho}"),
            CorrelationMatrix::equicorrelated(asset_labels(n), rho).unwrap(),
        ));
    }
    let mut worst = (0.0f64, String::new());
    for (name, c) in &cases {
        let (delta, _) = relative_participation_ratio(c, 20, 9).unwrap();
        if delta.abs() >= worst.0 {
            worst = (delta.abs(), name.clone());
        }
    }
    Outcome::new(
        "4 exact-zero",
        worst.0 <= 1e-12,
        format!("{} matrices, max |δ| = {:.2e} at {} (≤ 1e-12)", cases.len(), worst.0, worst.1),
    )
}

const FACTOR_SEED: u64 = 4_000;
const NULL_SEED: u64 = 42;

fn factor_discrimination() -> Vec<Outcome> {
    let start = Instant::now();
    let delta_for = |gamma: f64| {
        let spec = FactorSpec::one_factor(40, 4000, gamma, FACTOR_SEED);
        let c = correlate(&generate(&spec).unwrap());
        relative_participation_ratio(&c, 100, NULL_SEED).unwrap()
    };
    let (d0, s0) = delta_for(0.0);
    let (d5, s5) = delta_for(0.5);
    let elapsed = start.elapsed();
    vec![
        Outcome::new("5a factor γ=0", d0.abs() <= 0.05, format!("δ = {d0:.4} ± {s0:.4}, need |δ| ≤ 0.05")),
        Outcome::new("5b factor γ=0.5", d5 >= 0.2, format!("δ = {d5:.4} ± {s5:.4}, need δ ≥ 0.2")),
        Outcome::new(
            "5c factor runtime",
            elapsed < Duration::from_secs(60),
            format!("two N=40 T=4000 M=100 runs in {:.2} s (< 60 s)", elapsed.as_secs_f64()),
        ),
    ]
}

fn clustering_recovery() -> Outcome {
    let blocks = vec![
        Block { size: 9, gamma: 0.9 },
        Block { size: 1, gamma: 0.9 },
        Block { size: 12, gamma: 0.9 },
        Block { size: 1, gamma: 0.9 },
    ];
    let spec = FactorSpec::with_blocks(2000, blocks, 606);
    let c = correlate(&generate(&spec).unwrap());
    let tree = agglomerate(&correlation_distance(&c), Linkage::Average);
    let assignment = cut_at_correlation(&tree, 0.3).unwrap();
    let mut groups = assignment.groups();
    groups.iter_mut().for_each(|g| g.sort_unstable());
    groups.sort();
    let expected = vec![(0..9).collect::<Vec<_>>(), (10..22).collect()];
    let unclustered = assignment.unclustered();
    Outcome::new(
        "6 clustering",
        groups == expected && unclustered == vec![9, 22],
        format!("communities {groups:?}, unclustered {unclustered:?} (want blocks 0..9, 10..22; singletons 9, 22)"),
    )
}

fn fat_tail() -> Outcome {
    let blocks = vec![
        Block { size: 36, gamma: 0.5 },
        Block { size: 1, gamma: 0.0 },
        Block { size: 1, gamma: 0.0 },
        Block { size: 1, gamma: 0.0 },
        Block { size: 1, gamma: 0.0 },
    ];
    let n = 40;
    let injected: Vec<usize> = (36..40).collect();
    let spec = FactorSpec::with_blocks(4000, blocks, 77);
    let c = correlate(&generate(&spec).unwrap());
    let report = analyze(&c, 20, NULL_SEED).unwrap().report;
    let hist = independency_pdf(&report.independency, DEFAULT_HISTOGRAM_BINS).unwrap();
    let bin_of = |v: f64| {
        hist.edges[1..]
            .iter()
            .position(|&right| v <= right)
            .unwrap_or(hist.bins() - 1)
    };
    let lowest_factor_bin = (0..36).map(|l| bin_of(report.independency[l])).max().unwrap();
    let injected_bins: Vec<usize> = injected.iter().map(|&l| bin_of(report.independency[l])).collect();
    let in_tail = injected_bins.iter().all(|&b| b > lowest_factor_bin);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| report.npr[a].total_cmp(&report.npr[b]));
    let mut lowest: Vec<usize> = order[..injected.len()].to_vec();
    lowest.sort_unstable();
    Outcome::new(
        "7 fat-tail",
        in_tail && lowest == injected,
        format!(
            "injected independency bins {injected_bins:?} vs factor assets ≤ bin {lowest_factor_bin}; \
             lowest-NPR assets {lowest:?} (want {injected:?}); mean NPR injected {:.2} vs rest {:.2}",
            mean(&injected.iter().map(|&l| report.npr[l]).collect::<Vec<_>>()),
            mean(&report.npr[..36]),
        ),
    )
}

fn determinism() -> Vec<Outcome> {
    let dir = TempDir::new().unwrap();
    let prices = dir.path().join("prices.csv");
    run_synth(&SynthConfig {
        spec: FactorSpec::one_factor(500, 2000, 0.3, 8),
        volatility: 0.01,
        initial_price: 100.0,
        out: prices.clone(),
    })
    .unwrap();

    let mut first = RunConfig::new(&prices, dir.path().join("first"));
    first.seed = 2024;
    let mut second = first.clone();
    second.out = dir.path().join("second");

    let start = Instant::now();
    run_pipeline(&first).unwrap();
    let elapsed = start.elapsed();
    run_pipeline(&second).unwrap();

    let mut differing = Vec::new();
    let mut compared = 0;
    for entry in fs::read_dir(&first.out).unwrap() {
        let name = entry.unwrap().file_name();
        compared += 1;
        if fs::read(first.out.join(&name)).unwrap() != fs::read(second.out.join(&name)).unwrap() {
            differing.push(name.to_string_lossy().into_owned());
        }
    }
    vec![
        Outcome::new(
            "8a determinism",
            differing.is_empty() && compared > 0,
            format!("{compared} artifacts compared across two runs, differing: {differing:?}"),
        ),
        Outcome::new(
            "8b scale",
            elapsed < Duration::from_secs(120),
            format!("N=500 T=2000 M=100 full pipeline in {:.1} s (< 120 s)", elapsed.as_secs_f64()),
        ),
    ]
}

#[test]
fn acceptance() {
    let mut outcomes = vec![
        bounds_and_duality(),
        eigen_contract(),
        shuffle_conservation(),
        exact_zero_delta(),
    ];
    outcomes.extend(factor_discrimination());
    outcomes.push(clustering_recovery());
    outcomes.push(fat_tail());
    outcomes.extend(determinism());

    let failed: Vec<String> = outcomes
        .iter()
        .filter(|o| !o.pass)
        .map(|o| format!("{}: {}", o.id, o.detail))
        .collect();
    println!("{} of {} criteria passed", outcomes.len() - failed.len(), outcomes.len());
    assert!(failed.is_empty(), "failed criteria:\n{}", failed.join("\n"));
}
