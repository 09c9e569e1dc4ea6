//! Seedable random streams and block-partitioned Monte Carlo.
//!
//! Every estimate is built from blocks of [`BLOCK_SIZE`] samples. Block `b`
//! of angle pair `p` draws from the ChaCha8 stream `(p << 32) | b` of the
//! generator seeded with the run seed. Blocks are evaluated in parallel and
//! merged in block order, so the result is bit-identical for any number of
//! workers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::Result;

pub type StreamRng = ChaCha8Rng;

pub const BLOCK_SIZE: usize = 4096;

/// Generator for block `block` of angle pair `pair` under `seed`.
pub fn stream_rng(seed: u64, pair: u32, block: u32) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((u64::from(pair) << 32) | u64::from(block));
    rng
}

/// Count, mean and sum of squared deviations (Welford / Chan).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunningStats {
    pub count: usize,
    pub mean: f64,
    pub m2: f64,
}

impl RunningStats {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &RunningStats) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n_a = self.count as f64;
        let n_b = other.count as f64;
        let n = n_a + n_b;
        let delta = other.mean - self.mean;
        self.mean += delta * n_b / n;
        self.m2 += other.m2 + delta * delta * n_a * n_b / n;
        self.count += other.count;
    }

    /// Sample variance with the `n − 1` denominator.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.m2 / (self.count - 1) as f64).max(0.0)
        }
    }

    pub fn stderr(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            (self.variance() / self.count as f64).sqrt()
        }
    }
}

/// Average `sample` over `n` draws using the block stream layout for `pair`.
pub fn block_mean<F>(n: usize, seed: u64, pair: u32, sample: F) -> Result<RunningStats>
where
    F: Fn(&mut StreamRng) -> Result<f64> + Sync,
{
    let n_blocks = n.div_ceil(BLOCK_SIZE);
    let blocks: Vec<Result<RunningStats>> = (0..n_blocks)
        .into_par_iter()
        .map(|b| {
            let len = BLOCK_SIZE.min(n - b * BLOCK_SIZE);
            let mut rng = stream_rng(seed, pair, b as u32);
            let mut stats = RunningStats::default();
            for _ in 0..len {
                stats.push(sample(&mut rng)?);
            }
            Ok(stats)
        })
        .collect();
    let mut total = RunningStats::default();
    for block in blocks {
        total.merge(&block?);
    }
    Ok(total)
}
