use crate::instance::ArmSpec;
use crate::rng::Chance;

/// When the elimination test runs, measured in completed rounds (a round is
/// complete once every surviving arm has one more observation).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckCadence {
    EveryRound,
    /// Every `C` rounds, i.e. after `C * |S|` observations.
    EveryCRounds(u64),
    /// Whenever the common count is a power of two.
    PowersOfTwo,
}

/// `sqrt((2 alpha / s) ln(T / s))`, zero once `s >= T`.
pub fn etc_radius(alpha: f64, s: u64, horizon: f64) -> f64 {
    let s = s as f64;
    ((2.0 * alpha / s) * (horizon / s).ln().max(0.0)).sqrt()
}

/// Explore-then-commit elimination fed one observation at a time.
#[derive(Debug, Clone)]
pub struct Etc {
    alpha: f64,
    horizon: f64,
    cadence: CheckCadence,
    alive: Vec<bool>,
    counts: Vec<u64>,
    sums: Vec<f64>,
    level: u64,
    pending_rounds: u64,
}

impl Etc {
    pub fn new(k: usize, alpha: f64, horizon: f64, cadence: CheckCadence) -> Self {
        Self {
            alpha,
            horizon,
            cadence,
            alive: vec![true; k],
            counts: vec![0; k],
            sums: vec![0.0; k],
            level: 0,
            pending_rounds: 0,
        }
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn set_horizon(&mut self, horizon: f64) {
        self.horizon = horizon;
    }

    pub fn is_alive(&self, arm: usize) -> bool {
        self.alive[arm]
    }

    pub fn surviving(&self) -> Vec<usize> {
        (0..self.alive.len()).filter(|&i| self.alive[i]).collect()
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn mean(&self, arm: usize) -> Option<f64> {
        (self.counts[arm] > 0).then(|| self.sums[arm] / self.counts[arm] as f64)
    }

    /// Surviving arm with the fewest observations, lowest index first. With a
    /// dedicated stream of observations this is plain round robin over `S`.
    pub fn next_request(&self) -> usize {
        self.surviving()
            .into_iter()
            .min_by_key(|&i| (self.counts[i], i))
            .expect("surviving set is never empty")
    }

    fn min_count(&self) -> u64 {
        self.surviving()
            .iter()
            .map(|&i| self.counts[i])
            .min()
            .unwrap_or(0)
    }

    /// Adds an observation; eliminated arms are ignored. Returns true if the
    /// surviving set shrank.
    pub fn ingest(&mut self, arm: usize, reward: f64) -> bool {
        if !self.alive[arm] {
            return false;
        }
        self.counts[arm] += 1;
        self.sums[arm] += reward;
        let m = self.min_count();
        if m <= self.level {
            return false;
        }
        let old = self.level;
        self.level = m;
        let due = match self.cadence {
            CheckCadence::EveryRound => true,
            CheckCadence::EveryCRounds(c) => {
                self.pending_rounds += m - old;
                if self.pending_rounds >= c.max(1) {
                    self.pending_rounds = 0;
                    true
                } else {
                    false
                }
            }
            CheckCadence::PowersOfTwo => {
                let p = (old + 1).next_power_of_two();
                p <= m
            }
        };
        if !due {
            return false;
        }
        let shrank = self.eliminate();
        if shrank {
            self.level = self.min_count();
        }
        shrank
    }

    /// One ingest with the next requested arm sampled from `arms`.
    pub fn observe_next(&mut self, arms: &[ArmSpec], chance: &mut dyn Chance) -> bool {
        let i = self.next_request();
        let r = chance.reward(&arms[i]);
        self.ingest(i, r)
    }

    fn eliminate(&mut self) -> bool {
        let alive = self.surviving();
        let bounds: Vec<(usize, f64, f64)> = alive
            .iter()
            .map(|&i| {
                let s = self.counts[i];
                let m = self.sums[i] / s as f64;
                let r = etc_radius(self.alpha, s, self.horizon);
                (i, m + r, m - r)
            })
            .collect();
        let best_lower = bounds.iter().map(|b| b.2).fold(f64::NEG_INFINITY, f64::max);
        let mut shrank = false;
        for &(i, upper, _) in &bounds {
            if upper < best_lower {
                self.alive[i] = false;
                shrank = true;
            }
        }
        shrank
    }
}
