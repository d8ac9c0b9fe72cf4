use super::etc::{CheckCadence, Etc};
use super::ocucb::{ocucb_index, OcucbDenominator};
use super::{argmax_random, Policy, PolicyDecision};
use crate::counters::ObservationCounters;
use crate::rng::Chance;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActiveParams {
    pub alpha: f64,
    pub rho: f64,
    pub eta: f64,
    pub epoch_base: u32,
    pub share_info: bool,
    pub cadence: CheckCadence,
    pub denominator: OcucbDenominator,
}

impl Default for ActiveParams {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            rho: 0.5,
            eta: 2.0,
            epoch_base: 2,
            share_info: false,
            cadence: CheckCadence::EveryCRounds(10),
            denominator: OcucbDenominator::Own,
        }
    }
}

/// `base^(base^m)`, saturating at `u64::MAX`.
pub fn epoch_length(base: u32, m: u32) -> u64 {
    let Some(e) = base.checked_pow(m) else {
        return u64::MAX;
    };
    (base as u64).checked_pow(e).unwrap_or(u64::MAX)
}

/// ETC horizon during epoch `m`: `d^(3/2) ln d` with `d = d_{m+1}`.
pub fn etc_horizon(base: u32, m: u32) -> f64 {
    let ln_d = (base as f64).powf((m + 1) as f64) * (base as f64).ln();
    (1.5 * ln_d).exp() * ln_d
}

/// Epoch-based algorithm: OCUCB-n pulls over the current active set while an
/// ETC instance spends the free observations; the ETC survivors become the
/// next epoch's active set.
#[derive(Debug, Clone)]
pub struct EtcOcucb {
    params: ActiveParams,
    epoch: u32,
    epoch_len: u64,
    elapsed: u64,
    active: Vec<usize>,
    counts: Vec<u64>,
    sums: Vec<f64>,
    etc: Etc,
}

impl EtcOcucb {
    pub fn new(k: usize, params: ActiveParams) -> Self {
        assert!(params.epoch_base >= 2, "epoch base must be at least 2");
        Self {
            params,
            epoch: 0,
            epoch_len: epoch_length(params.epoch_base, 0),
            elapsed: 0,
            active: (0..k).collect(),
            counts: vec![0; k],
            sums: vec![0.0; k],
            etc: Etc::new(
                k,
                params.alpha,
                etc_horizon(params.epoch_base, 0),
                params.cadence,
            ),
        }
    }

    pub fn epoch(&self) -> u32 {
        self.epoch
    }

    pub fn active_set(&self) -> &[usize] {
        &self.active
    }

    pub fn etc(&self) -> &Etc {
        &self.etc
    }

    fn add(&mut self, arm: usize, reward: f64) {
        if self.active.contains(&arm) {
            self.counts[arm] += 1;
            self.sums[arm] += reward;
        }
    }

    fn next_epoch(&mut self) {
        self.epoch += 1;
        self.active = self.etc.surviving();
        self.counts.iter_mut().for_each(|c| *c = 0);
        self.sums.iter_mut().for_each(|s| *s = 0.0);
        self.elapsed = 0;
        self.epoch_len = epoch_length(self.params.epoch_base, self.epoch);
        self.etc
            .set_horizon(etc_horizon(self.params.epoch_base, self.epoch));
    }
}

impl Policy for EtcOcucb {
    fn decide(
        &mut self,
        _counters: &ObservationCounters,
        chance: &mut dyn Chance,
    ) -> PolicyDecision {
        let free_request = Some(self.etc.next_request());
        if let Some(&i) = self.active.iter().find(|&&i| self.counts[i] == 0) {
            return PolicyDecision {
                pull: i,
                free_request,
            };
        }
        if self.active.len() == 1 {
            return PolicyDecision {
                pull: self.active[0],
                free_request,
            };
        }
        let counts: Vec<u64> = self.active.iter().map(|&i| self.counts[i]).collect();
        let means: Vec<f64> = self
            .active
            .iter()
            .map(|&i| self.sums[i] / self.counts[i] as f64)
            .collect();
        let t = self.elapsed + 1;
        let p = &self.params;
        let scores = (0..self.active.len()).map(|j| {
            let v = ocucb_index(j, &counts, &means, t, p.eta, p.rho, p.denominator)
                .expect("active arms are initialised");
            (self.active[j], v)
        });
        let pull = argmax_random(scores, chance);
        PolicyDecision { pull, free_request }
    }

    fn on_pull(&mut self, arm: usize, reward: f64) {
        self.add(arm, reward);
        if self.params.share_info {
            self.etc.ingest(arm, reward);
        }
        self.elapsed += 1;
        if self.elapsed >= self.epoch_len {
            self.next_epoch();
        }
    }

    fn on_free(&mut self, arm: usize, reward: f64) {
        self.etc.ingest(arm, reward);
        if self.params.share_info {
            self.add(arm, reward);
        }
    }

    fn requests_free(&self) -> bool {
        true
    }
}
