use super::{argmax_random, first_unpulled, Policy, PolicyDecision};
use crate::counters::ObservationCounters;
use crate::rng::Chance;

/// Follow the leader on all observations, free observations in round robin.
#[derive(Debug, Clone)]
pub struct FtlRobin {
    k: usize,
    next_free: usize,
}

impl FtlRobin {
    pub fn new(k: usize) -> Self {
        Self { k, next_free: 0 }
    }
}

impl Policy for FtlRobin {
    fn decide(
        &mut self,
        counters: &ObservationCounters,
        chance: &mut dyn Chance,
    ) -> PolicyDecision {
        let pull =
            first_unpulled(counters.pulls().iter().copied().enumerate()).unwrap_or_else(|| {
                argmax_random(
                    (0..self.k).map(|i| (i, counters.mean_combined(i).unwrap_or(f64::INFINITY))),
                    chance,
                )
            });
        PolicyDecision {
            pull,
            free_request: Some(self.next_free),
        }
    }

    fn on_free(&mut self, _arm: usize, _reward: f64) {
        self.next_free = (self.next_free + 1) % self.k;
    }

    fn requests_free(&self) -> bool {
        true
    }
}
