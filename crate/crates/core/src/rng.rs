use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::instance::ArmSpec;

/// Deterministic stream keyed by `(master_seed, index)`.
///
/// The index selects a ChaCha stream, so replications never share state and
/// the sequence seen by replication `i` does not depend on how many other
/// replications run or in which thread.
#[derive(Debug, Clone)]
pub struct RngStream {
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(master_seed: u64, index: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(master_seed);
        inner.set_stream(index);
        Self { inner }
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

/// Every random choice a run makes goes through this trait, so the exact
/// oracle can replace sampling by enumeration.
pub trait Chance {
    fn reward(&mut self, arm: &ArmSpec) -> f64;
    /// Bernoulli(p) coin.
    fn coin(&mut self, p: f64) -> bool;
    /// Draw from a (validated) probability vector.
    fn categorical(&mut self, p: &[f64]) -> usize;
    /// Uniform index in `0..n`, `n >= 1`.
    fn pick(&mut self, n: usize) -> usize;
}

impl<R: RngCore> Chance for R {
    fn reward(&mut self, arm: &ArmSpec) -> f64 {
        arm.sample(self)
    }

    fn coin(&mut self, p: f64) -> bool {
        self.random::<f64>() < p
    }

    fn categorical(&mut self, p: &[f64]) -> usize {
        let u: f64 = self.random();
        let mut acc = 0.0;
        let mut last = 0;
        for (i, &w) in p.iter().enumerate() {
            if w <= 0.0 {
                continue;
            }
            acc += w;
            last = i;
            if u < acc {
                return i;
            }
        }
        last
    }

    fn pick(&mut self, n: usize) -> usize {
        if n <= 1 {
            0
        } else {
            self.random_range(0..n)
        }
    }
}
