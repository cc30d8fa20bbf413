mod common;

use collective::clustering::cut_height;
use collective::{
    agglomerate, correlate, correlation_distance, cut_at_correlation, generate_blocks, generate_one_factor,
    relative_participation_ratio, reorder_heatmap, Block, CorrelationMatrix, FactorSpec, Linkage, Matrix,
};
use common::random_correlation;
use proptest::prelude::*;

fn block_correlation() -> CorrelationMatrix {
    // within-block distance 0.1 and across-block 1.5
    let within = 1.0 - 0.1f64 * 0.1 / 2.0;
    let across = 1.0 - 1.5f64 * 1.5 / 2.0;
    let m = Matrix::from_fn(6, 6, |i, j| match (i == j, i % 2 == j % 2) {
        (true, _) => 1.0,
        (false, true) => within,
        (false, false) => across,
    });
    CorrelationMatrix::new(common::labels(6), m).unwrap()
}

#[test]
fn interleaved_blocks_become_contiguous() {
    let c = block_correlation();
    let tree = agglomerate(&correlation_distance(&c), Linkage::Average);
    assert!((tree.merges[4].height - 1.5).abs() < 1e-12);
    let h = reorder_heatmap(&c, &tree).unwrap();
    let parity: Vec<usize> = h.leaf_order.iter().map(|i| i % 2).collect();
    assert!(parity[..3].iter().all(|&p| p == parity[0]));
    assert!(parity[3..].iter().all(|&p| p != parity[0]));
    for i in 0..6 {
        for j in 0..6 {
            let same = (i < 3) == (j < 3);
            assert_eq!(h.matrix[(i, j)] > 0.9, same);
        }
    }
    let a = cut_at_correlation(&tree, 0.3).unwrap();
    assert_eq!(a.groups().len(), 2);
    assert!(a.unclustered().is_empty());
    for g in a.groups() {
        assert!(g.iter().all(|&i| i % 2 == g[0] % 2));
    }
}

#[test]
fn identity_order_leaves_heatmap_unchanged() {
    let c = CorrelationMatrix::new(
        common::labels(3),
        Matrix::from_rows(&[vec![1.0, 0.9, 0.1], vec![0.9, 1.0, 0.2], vec![0.1, 0.2, 1.0]]).unwrap(),
    )
    .unwrap();
    let tree = agglomerate(&correlation_distance(&c), Linkage::Average);
    assert_eq!(tree.leaf_order, vec![2, 0, 1]);
    let mut t = tree.clone();
    t.leaf_order = vec![0, 1, 2];
    assert_eq!(reorder_heatmap(&c, &t).unwrap().matrix, *c.entries());
}

#[test]
fn two_block_market_is_recovered() {
    let spec = FactorSpec::with_blocks(
        2000,
        vec![Block { size: 8, gamma: 0.9 }, Block { size: 7, gamma: 0.9 }],
        31,
    );
    let c = correlate(&generate_blocks(&spec).unwrap());
    let tree = agglomerate(&correlation_distance(&c), Linkage::Average);
    let a = cut_at_correlation(&tree, 0.3).unwrap();
    let mut groups = a.groups();
    groups.sort();
    assert_eq!(groups, vec![(0..8).collect::<Vec<_>>(), (8..15).collect::<Vec<_>>()]);
    assert!(a.unclustered().is_empty());
}

#[test]
fn one_factor_noise_floor() {
    let t = 3000;
    let c = correlate(&generate_one_factor(&FactorSpec::one_factor(10, t, 0.0, 8)).unwrap());
    let bound = 4.0 / (t as f64).sqrt();
    assert!(c.off_diagonal().iter().all(|v| v.abs() < bound));
}

#[test]
fn one_factor_mean_correlation() {
    let c = correlate(&generate_one_factor(&FactorSpec::one_factor(40, 4000, 0.5, 12)).unwrap());
    let off = c.off_diagonal();
    let mean = off.iter().sum::<f64>() / off.len() as f64;
    assert!((mean - 0.5).abs() < 0.03, "{mean}");
}

#[test]
fn singleton_blocks_have_no_collective_structure() {
    let spec = FactorSpec::with_blocks(4000, vec![Block { size: 1, gamma: 0.8 }; 20], 3);
    let c = correlate(&generate_blocks(&spec).unwrap());
    assert!(c.off_diagonal().iter().all(|v| v.abs() < 4.0 / 4000f64.sqrt()));
    let (delta, _) = relative_participation_ratio(&c, 20, 4).unwrap();
    assert!(delta.abs() < 0.05, "{delta}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn tree_shape_and_monotone_heights(n in 2usize..25, seed in any::<u64>(), which in 0usize..3) {
        let linkage = [Linkage::Average, Linkage::Single, Linkage::Complete][which];
        let c = random_correlation(n, n + 5, seed);
        let tree = agglomerate(&correlation_distance(&c), linkage);
        prop_assert_eq!(tree.merges.len(), n - 1);
        prop_assert!(tree.merges.windows(2).all(|w| w[0].height <= w[1].height));
        prop_assert_eq!(tree.merges.last().unwrap().size, n);
        let mut order = tree.leaf_order.clone();
        order.sort();
        prop_assert_eq!(order, (0..n).collect::<Vec<_>>());
        // every subtree occupies a contiguous run of the drawing order
        let pos: Vec<usize> = {
            let mut p = vec![0; n];
            for (k, &leaf) in tree.leaf_order.iter().enumerate() { p[leaf] = k; }
            p
        };
        for node in n..2 * n - 1 {
            let leaves = tree.leaves_under(node);
            let lo = leaves.iter().map(|&l| pos[l]).min().unwrap();
            let hi = leaves.iter().map(|&l| pos[l]).max().unwrap();
            prop_assert_eq!(hi - lo + 1, leaves.len());
        }
    }

    #[test]
    fn higher_threshold_refines(n in 3usize..20, seed in any::<u64>(), lo in -0.9f64..0.9, step in 0.0f64..0.5) {
        let hi = (lo + step).min(0.95);
        let c = random_correlation(n, 6, seed);
        let tree = agglomerate(&correlation_distance(&c), Linkage::Average);
        let coarse = cut_at_correlation(&tree, lo).unwrap();
        let fine = cut_at_correlation(&tree, hi).unwrap();
        prop_assert!(cut_height(hi) <= cut_height(lo));
        for i in 0..n {
            for j in 0..n {
                if fine.community[i] >= 0 && fine.community[i] == fine.community[j] {
                    prop_assert_eq!(coarse.community[i], coarse.community[j]);
                    prop_assert!(coarse.community[i] >= 0);
                }
            }
        }
    }

    #[test]
    fn heatmap_is_a_symmetric_permutation(n in 2usize..15, seed in any::<u64>()) {
        let c = random_correlation(n, 10, seed);
        let tree = agglomerate(&correlation_distance(&c), Linkage::Complete);
        let h = reorder_heatmap(&c, &tree).unwrap();
        let mut before = c.entries().as_slice().to_vec();
        let mut after = h.matrix.as_slice().to_vec();
        before.sort_by(f64::total_cmp);
        after.sort_by(f64::total_cmp);
        prop_assert_eq!(before, after);
        for i in 0..n {
            prop_assert_eq!(&h.labels[i], &c.labels()[tree.leaf_order[i]]);
            for j in 0..n {
                prop_assert_eq!(h.matrix[(i, j)], c.get(tree.leaf_order[i], tree.leaf_order[j]));
            }
        }
    }
}
