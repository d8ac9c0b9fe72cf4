use serde::{Deserialize, Serialize};

use crate::counters::ObservationCounters;
use crate::environment::{passive_draw, FreeObsSchedule, ObserverMode};
use crate::error::{Error, Result};
use crate::instance::ProblemInstance;
use crate::policy::Policy;
use crate::rng::Chance;

/// Pseudo-regret at each checkpoint plus the final per-arm counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretTrace {
    pub checkpoints: Vec<u64>,
    pub regret: Vec<f64>,
    pub pulls: Vec<u64>,
    pub free: Vec<u64>,
}

impl RegretTrace {
    pub fn final_regret(&self) -> f64 {
        self.regret.last().copied().unwrap_or(0.0)
    }
}

pub fn validate_checkpoints(checkpoints: &[u64], horizon: u64) -> Result<()> {
    if checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::config("checkpoints", "must be strictly increasing"));
    }
    if checkpoints.iter().any(|&c| c == 0 || c > horizon) {
        return Err(Error::config(
            "checkpoints",
            format!("must lie in [1, {horizon}]"),
        ));
    }
    Ok(())
}

/// Plays `horizon` stages. Each stage: the policy decides, the pulled arm's
/// reward is drawn, then `Z_t` is drawn and on arrival the free arm is
/// chosen (by `p` or by the policy) and observed.
pub fn run_episode(
    instance: &ProblemInstance,
    schedule: &FreeObsSchedule,
    observer: &ObserverMode,
    policy: &mut dyn Policy,
    horizon: u64,
    checkpoints: &[u64],
    chance: &mut dyn Chance,
) -> Result<RegretTrace> {
    validate_checkpoints(checkpoints, horizon)?;
    let k = instance.k();
    if let ObserverMode::Passive(p) = observer {
        if p.len() != k {
            return Err(Error::InvalidDistribution(format!(
                "{} weights for {k} arms",
                p.len()
            )));
        }
    }
    let mut counters = ObservationCounters::new(k);
    let mut regret = Vec::with_capacity(checkpoints.len());
    let mut next = 0;
    let mut running = 0.0;
    for t in 1..=horizon {
        let d = policy.decide(&counters, chance);
        let r = chance.reward(&instance.arms()[d.pull]);
        counters.record_pull(d.pull, r)?;
        running += instance.gaps()[d.pull];
        policy.on_pull(d.pull, r);
        if schedule.available(t, chance) {
            let f = match observer {
                ObserverMode::Passive(p) => Some(passive_draw(p, chance)?),
                ObserverMode::Active => d.free_request,
            };
            if let Some(f) = f {
                if f >= k {
                    return Err(Error::IndexOutOfRange { index: f, len: k });
                }
                let r = chance.reward(&instance.arms()[f]);
                counters.record_free(f, r)?;
                policy.on_free(f, r);
            }
        }
        if next < checkpoints.len() && checkpoints[next] == t {
            let exact = instance.pseudo_regret(counters.pulls());
            debug_assert!((exact - running).abs() <= 1e-9 * exact.max(1.0));
            regret.push(exact);
            next += 1;
        }
    }
    Ok(RegretTrace {
        checkpoints: checkpoints.to_vec(),
        regret,
        pulls: counters.pulls().to_vec(),
        free: counters.free().to_vec(),
    })
}
