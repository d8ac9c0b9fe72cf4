use crate::error::{Error, Result};

/// Per-arm pull and free-observation tallies with reward sums by source.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationCounters {
    pulls: Vec<u64>,
    free: Vec<u64>,
    sum_pull: Vec<f64>,
    sum_free: Vec<f64>,
    t: u64,
}

impl ObservationCounters {
    pub fn new(k: usize) -> Self {
        Self {
            pulls: vec![0; k],
            free: vec![0; k],
            sum_pull: vec![0.0; k],
            sum_free: vec![0.0; k],
            t: 0,
        }
    }

    pub fn k(&self) -> usize {
        self.pulls.len()
    }

    /// Number of completed stages.
    pub fn t(&self) -> u64 {
        self.t
    }

    fn check(&self, arm: usize) -> Result<()> {
        if arm < self.k() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index: arm,
                len: self.k(),
            })
        }
    }

    pub fn record_pull(&mut self, arm: usize, reward: f64) -> Result<()> {
        self.check(arm)?;
        self.pulls[arm] += 1;
        self.sum_pull[arm] += reward;
        self.t += 1;
        Ok(())
    }

    pub fn record_free(&mut self, arm: usize, reward: f64) -> Result<()> {
        self.check(arm)?;
        self.free[arm] += 1;
        self.sum_free[arm] += reward;
        Ok(())
    }

    pub fn pulls(&self) -> &[u64] {
        &self.pulls
    }

    pub fn free(&self) -> &[u64] {
        &self.free
    }

    pub fn observations(&self, arm: usize) -> u64 {
        self.pulls[arm] + self.free[arm]
    }

    pub fn sum_pull(&self, arm: usize) -> f64 {
        self.sum_pull[arm]
    }

    pub fn sum_free(&self, arm: usize) -> f64 {
        self.sum_free[arm]
    }

    pub fn mean_pull(&self, arm: usize) -> Option<f64> {
        ratio(self.sum_pull[arm], self.pulls[arm])
    }

    pub fn mean_free(&self, arm: usize) -> Option<f64> {
        ratio(self.sum_free[arm], self.free[arm])
    }

    pub fn mean_combined(&self, arm: usize) -> Option<f64> {
        ratio(
            self.sum_pull[arm] + self.sum_free[arm],
            self.observations(arm),
        )
    }
}

fn ratio(sum: f64, n: u64) -> Option<f64> {
    (n > 0).then(|| sum / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn pull_then_free() {
        let mut c = ObservationCounters::new(2);
        c.record_pull(0, 0.3).unwrap();
        assert_eq!((c.pulls()[0], c.observations(0), c.t()), (1, 1, 1));
        c.record_free(1, 0.9).unwrap();
        assert_eq!((c.free()[1], c.observations(1), c.t()), (1, 1, 1));
        assert_eq!(c.mean_combined(1), Some(0.9));
        assert_eq!(c.mean_pull(1), None);
        assert!(c.record_free(2, 0.0).is_err());
    }

    #[test]
    fn combined_count() {
        let mut c = ObservationCounters::new(3);
        for _ in 0..100 {
            c.record_pull(2, 1.0).unwrap();
        }
        for _ in 0..10 {
            c.record_free(2, 0.0).unwrap();
        }
        assert_eq!(c.observations(2), 110);
        assert!((c.mean_combined(2).unwrap() - 100.0 / 110.0).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn invariants_hold_under_random_actions(
            ops in prop::collection::vec((any::<bool>(), 0usize..4, -5.0f64..5.0), 0..300)
        ) {
            let mut c = ObservationCounters::new(4);
            let mut prev = c.clone();
            let mut pulls = 0u64;
            for (is_pull, arm, r) in ops {
                if is_pull {
                    c.record_pull(arm, r).unwrap();
                    pulls += 1;
                } else {
                    c.record_free(arm, r).unwrap();
                }
                prop_assert_eq!(c.t(), pulls);
                prop_assert_eq!(c.pulls().iter().sum::<u64>(), c.t());
                for i in 0..4 {
                    prop_assert_eq!(c.observations(i), c.pulls()[i] + c.free()[i]);
                    prop_assert!(c.pulls()[i] >= prev.pulls()[i]);
                    prop_assert!(c.free()[i] >= prev.free()[i]);
                }
                prop_assert!(c.t() >= prev.t());
                prev = c.clone();
            }
        }
    }
}
