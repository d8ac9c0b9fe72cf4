//! Experiment orchestration: configuration, seeded replications, aggregation,
//! CSV output, epsilon sweeps and the exact oracle for tiny horizons.

pub mod config;
pub mod oracle;
pub mod output;
pub mod run;
pub mod stats;
pub mod sweep;

pub use config::{
    default_checkpoints, load_config, parse_config, Experiment, ExperimentConfig, PolicySpec,
};
pub use oracle::brute_force_expected_regret;
pub use run::{run_replicated, run_single, run_traces};
pub use stats::{quantile_nearest_rank, AggregateStats};
pub use sweep::{sweep_epsilon, SweepRow};
