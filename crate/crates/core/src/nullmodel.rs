//! Shuffled null model: the off-diagonal correlation values are kept but
//! their placement is randomized, which erases any structure in who is
//! correlated with whom.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::correlation::CorrelationMatrix;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Name of the generator behind every shuffle, recorded in reports.
pub const RNG_ALGORITHM: &str = "ChaCha8Rng (rand_chacha 0.9), seed_from_u64(seed), stream = ensemble member index";

pub const DEFAULT_ENSEMBLE_SIZE: usize = 100;

/// Independent, reproducible generator for one ensemble member.
pub fn member_rng(seed: u64, member: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(member as u64);
    rng
}

/// Permutes the upper-triangle off-diagonal entries uniformly at random
/// (Fisher–Yates) and mirrors them into the lower triangle.
pub fn shuffle_once<R: Rng + ?Sized>(c: &CorrelationMatrix, rng: &mut R) -> CorrelationMatrix {
    let n = c.n();
    let mut values = c.off_diagonal();
    for i in (1..values.len()).rev() {
        let j = rng.random_range(0..=i);
        values.swap(i, j);
    }
    let mut entries = Matrix::identity(n);
    let mut it = values.into_iter();
    for i in 0..n {
        for j in (i + 1)..n {
            let v = it.next().expect("one value per upper-triangle slot");
            entries[(i, j)] = v;
            entries[(j, i)] = v;
        }
    }
    CorrelationMatrix::from_parts_unchecked(c.labels().to_vec(), entries)
}

/// Member `member` of the ensemble seeded by `seed`.
pub fn shuffled_member(c: &CorrelationMatrix, seed: u64, member: usize) -> CorrelationMatrix {
    shuffle_once(c, &mut member_rng(seed, member))
}

#[derive(Debug, Clone)]
pub struct ShuffleEnsemble {
    pub base: CorrelationMatrix,
    pub seed: u64,
    pub members: Vec<CorrelationMatrix>,
}

impl ShuffleEnsemble {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// `count` shuffles of `c`; identical arguments give bit-identical members.
pub fn make_ensemble(c: &CorrelationMatrix, count: usize, seed: u64) -> Result<ShuffleEnsemble> {
    if count == 0 {
        return Err(Error::Invalid("ensemble size must be at least 1".into()));
    }
    let members = (0..count)
        .into_par_iter()
        .map(|m| shuffled_member(c, seed, m))
        .collect();
    Ok(ShuffleEnsemble {
        base: c.clone(),
        seed,
        members,
    })
}
