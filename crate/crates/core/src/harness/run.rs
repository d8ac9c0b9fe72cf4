use rayon::prelude::*;

use super::config::Experiment;
use super::stats::AggregateStats;
use crate::error::Result;
use crate::rng::RngStream;
use crate::sim::{run_episode, RegretTrace};

/// Replication `index` of `exp`, driven by `RngStream(exp.seed, index)`.
pub fn run_single(exp: &Experiment, index: u64) -> Result<RegretTrace> {
    let mut rng = RngStream::new(exp.seed, index);
    let mut policy = exp.policy.build(exp.instance.k());
    run_episode(
        &exp.instance,
        &exp.schedule,
        &exp.observer,
        policy.as_mut(),
        exp.horizon,
        &exp.checkpoints,
        &mut rng,
    )
}

/// All replications on the current rayon pool, in replication order.
pub fn run_traces(exp: &Experiment) -> Result<Vec<RegretTrace>> {
    (0..exp.replications)
        .into_par_iter()
        .map(|i| run_single(exp, i))
        .collect()
}

pub fn run_replicated(exp: &Experiment) -> Result<AggregateStats> {
    AggregateStats::from_traces(&run_traces(exp)?)
}
