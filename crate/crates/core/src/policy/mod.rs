//! Decision rules. Each policy sees the shared counters, returns the arm to
//! pull and (optionally) the arm it wants to observe if a free observation
//! arrives, and is told about every reward it receives.

mod active;
mod etc;
mod ftl_robin;
mod ocucb;
mod ucb;

pub use active::{epoch_length, etc_horizon, ActiveParams, EtcOcucb};
pub use etc::{etc_radius, CheckCadence, Etc};
pub use ftl_robin::FtlRobin;
pub use ocucb::{ocucb_index, OcucbDenominator};
pub use ucb::{ucb_passive_index, Ucb, Ucb1Double};

use crate::counters::ObservationCounters;
use crate::rng::Chance;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PolicyDecision {
    pub pull: usize,
    /// Only consulted by an active observer when `Z_t = 1`.
    pub free_request: Option<usize>,
}

pub trait Policy {
    fn decide(&mut self, counters: &ObservationCounters, chance: &mut dyn Chance)
        -> PolicyDecision;

    fn on_pull(&mut self, _arm: usize, _reward: f64) {}

    fn on_free(&mut self, _arm: usize, _reward: f64) {}

    /// Whether `free_request` is meaningful, i.e. the policy can drive an
    /// active observer.
    fn requests_free(&self) -> bool {
        false
    }
}

/// Uniformly random maximiser. NaN scores never win.
pub(crate) fn argmax_random(
    scores: impl IntoIterator<Item = (usize, f64)>,
    chance: &mut dyn Chance,
) -> usize {
    let mut best = f64::NEG_INFINITY;
    let mut ties: Vec<usize> = Vec::new();
    for (i, s) in scores {
        if s.is_nan() {
            continue;
        }
        if s > best {
            best = s;
            ties.clear();
            ties.push(i);
        } else if s == best {
            ties.push(i);
        }
    }
    match ties.len() {
        0 => 0,
        1 => ties[0],
        n => ties[chance.pick(n)],
    }
}

/// First arm (in `arms` order) with no pulls yet.
pub(crate) fn first_unpulled(counts: impl IntoIterator<Item = (usize, u64)>) -> Option<usize> {
    counts.into_iter().find(|&(_, n)| n == 0).map(|(i, _)| i)
}
