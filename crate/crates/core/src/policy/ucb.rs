use super::{argmax_random, first_unpulled, Policy, PolicyDecision};
use crate::counters::ObservationCounters;
use crate::error::{Error, Result};
use crate::rng::Chance;

/// `mean + sqrt(6 ln t / n)`.
pub fn ucb_passive_index(mean: f64, n: u64, t: u64) -> Result<f64> {
    if n == 0 || t == 0 {
        return Err(Error::domain(format!(
            "ucb index needs n >= 1 and t >= 1, got n={n}, t={t}"
        )));
    }
    Ok(index(mean, n, t))
}

fn index(mean: f64, n: u64, t: u64) -> f64 {
    mean + (6.0 * (t as f64).ln() / n as f64).sqrt()
}

/// UCB with the `6 ln t` exploration term. `use_free` selects whether free
/// observations enter the estimates.
#[derive(Debug, Clone)]
pub struct Ucb {
    k: usize,
    use_free: bool,
}

impl Ucb {
    pub fn passive(k: usize) -> Self {
        Self { k, use_free: true }
    }

    /// Ignores free observations altogether.
    pub fn baseline(k: usize) -> Self {
        Self { k, use_free: false }
    }

    fn scores<'a>(&'a self, c: &'a ObservationCounters) -> impl Iterator<Item = (usize, f64)> + 'a {
        let t = c.t() + 1;
        (0..self.k).map(move |i| {
            let (n, m) = if self.use_free {
                (c.observations(i), c.mean_combined(i))
            } else {
                (c.pulls()[i], c.mean_pull(i))
            };
            match m {
                Some(m) => (i, index(m, n, t)),
                None => (i, f64::INFINITY),
            }
        })
    }
}

impl Policy for Ucb {
    fn decide(
        &mut self,
        counters: &ObservationCounters,
        chance: &mut dyn Chance,
    ) -> PolicyDecision {
        let pull = first_unpulled(counters.pulls().iter().copied().enumerate())
            .unwrap_or_else(|| argmax_random(self.scores(counters), chance));
        PolicyDecision {
            pull,
            free_request: None,
        }
    }
}

/// Pulls the UCB leader and asks to observe the runner-up.
#[derive(Debug, Clone)]
pub struct Ucb1Double {
    ucb: Ucb,
}

impl Ucb1Double {
    pub fn new(k: usize) -> Self {
        assert!(k >= 2, "ucb1-double needs at least two arms");
        Self {
            ucb: Ucb::passive(k),
        }
    }
}

impl Policy for Ucb1Double {
    fn decide(
        &mut self,
        counters: &ObservationCounters,
        chance: &mut dyn Chance,
    ) -> PolicyDecision {
        let scores: Vec<(usize, f64)> = self.ucb.scores(counters).collect();
        let pull = first_unpulled(counters.pulls().iter().copied().enumerate())
            .unwrap_or_else(|| argmax_random(scores.iter().copied(), chance));
        let second = argmax_random(scores.into_iter().filter(|&(i, _)| i != pull), chance);
        PolicyDecision {
            pull,
            free_request: Some(second),
        }
    }

    fn requests_free(&self) -> bool {
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    #[test]
    fn index_values() {
        let v = ucb_passive_index(0.5, 4, 100).unwrap();
        assert!((v - 3.128260884878466).abs() < 1e-12);
        assert_eq!(ucb_passive_index(0.25, 7, 1).unwrap(), 0.25);
        assert!((ucb_passive_index(0.25, 1_000_000_000, 100).unwrap() - 0.25).abs() < 1e-3);
        assert!(ucb_passive_index(0.0, 0, 10).is_err());
    }

    #[test]
    fn forced_initialisation_order() {
        let mut c = ObservationCounters::new(4);
        let mut p = Ucb::passive(4);
        let mut rng = RngStream::new(0, 0);
        for want in 0..4 {
            let d = p.decide(&c, &mut rng);
            assert_eq!(d.pull, want);
            assert_eq!(d.free_request, None);
            c.record_pull(d.pull, 0.0).unwrap();
        }
        assert_eq!(c.t(), 4);
    }

    #[test]
    fn free_data_changes_passive_only() {
        let mut c = ObservationCounters::new(2);
        c.record_pull(0, 1.0).unwrap();
        c.record_pull(1, 0.0).unwrap();
        for _ in 0..50 {
            c.record_free(0, 1.0).unwrap();
        }
        let mut rng = RngStream::new(0, 0);
        // Arm 0 is well explored through free data, so the passive index
        // prefers the uncertain arm 1; the baseline still sees n=1 for both.
        assert_eq!(Ucb::passive(2).decide(&c, &mut rng).pull, 1);
        assert_eq!(Ucb::baseline(2).decide(&c, &mut rng).pull, 0);
    }

    #[test]
    fn double_observes_the_other_arm() {
        let mut c = ObservationCounters::new(2);
        c.record_pull(0, 0.3).unwrap();
        c.record_pull(1, 0.7).unwrap();
        let mut p = Ucb1Double::new(2);
        let mut rng = RngStream::new(0, 0);
        for _ in 0..20 {
            let d = p.decide(&c, &mut rng);
            assert_ne!(Some(d.pull), d.free_request);
        }
    }
}
