//! Stochastic multi-armed bandits where the learner occasionally receives a
//! free observation of some arm in addition to the pulled one.
//!
//! The crate covers the simulation model ([`instance`], [`environment`],
//! [`sim`]), the decision rules ([`policy`]), closed-form regret bounds
//! ([`bounds`]), Monte-Carlo checks of the supporting tail inequalities
//! ([`concentration`]) and a reproducible experiment harness with a CLI
//! ([`harness`], [`cli`]).

pub mod bounds;
pub mod cli;
pub mod concentration;
pub mod counters;
pub mod environment;
pub mod error;
pub mod harness;
pub mod instance;
pub mod policy;
pub mod rng;
pub mod sim;

pub use counters::ObservationCounters;
pub use environment::{FreeObsSchedule, ObserverMode};
pub use error::{Error, Result};
pub use instance::{ArmSpec, ProblemInstance};
pub use policy::{Policy, PolicyDecision};
pub use rng::{Chance, RngStream};
pub use sim::{run_episode, RegretTrace};
