use super::config::Experiment;
use super::run::run_replicated;
use crate::environment::FreeObsSchedule;
use crate::error::Result;

/// Final-stage statistics for one epsilon.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub epsilon: f64,
    pub mean: f64,
    pub q10: f64,
    pub q25: f64,
    pub q75: f64,
    pub q90: f64,
}

/// `exp` with its free-observation rate replaced by `eps`. A schedule
/// without free observations becomes static random.
pub fn with_epsilon(exp: &Experiment, eps: f64) -> Result<Experiment> {
    let schedule = match exp.schedule {
        FreeObsSchedule::Deterministic(_) => FreeObsSchedule::deterministic(eps)?,
        FreeObsSchedule::StaticRandom(_) | FreeObsSchedule::None => {
            FreeObsSchedule::static_random(eps)?
        }
    };
    Ok(Experiment {
        schedule,
        ..exp.clone()
    })
}

pub fn sweep_epsilon(exp: &Experiment, eps_list: &[f64]) -> Result<Vec<SweepRow>> {
    eps_list
        .iter()
        .map(|&eps| {
            let s = run_replicated(&with_epsilon(exp, eps)?)?;
            let last = s.checkpoints.len() - 1;
            Ok(SweepRow {
                epsilon: eps,
                mean: s.mean[last],
                q10: s.q10[last],
                q25: s.q25[last],
                q75: s.q75[last],
                q90: s.q90[last],
            })
        })
        .collect()
}
