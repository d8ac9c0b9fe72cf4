use crate::environment::{FreeObsSchedule, ObserverMode};
use crate::error::{Error, Result};
use crate::instance::{ArmSpec, ProblemInstance};
use crate::policy::Policy;
use crate::rng::Chance;
use crate::sim::run_episode;

pub const LEAF_BUDGET: usize = 1_000_000;

/// A `Chance` that follows a scripted branch at every random choice and
/// records the branching so the caller can enumerate the whole tree.
struct Replay {
    script: Vec<usize>,
    /// number of branches at each recorded choice
    widths: Vec<usize>,
    pos: usize,
    weight: f64,
}

impl Replay {
    fn choose(&mut self, weights: &[f64]) -> usize {
        let c = if self.pos < self.script.len() {
            self.script[self.pos]
        } else {
            self.script.push(0);
            0
        };
        if self.pos < self.widths.len() {
            self.widths[self.pos] = weights.len();
        } else {
            self.widths.push(weights.len());
        }
        self.pos += 1;
        self.weight *= weights[c];
        c
    }

    /// Moves to the next leaf in depth-first order; false when exhausted.
    fn advance(&mut self) -> bool {
        self.script.truncate(self.pos);
        self.widths.truncate(self.pos);
        while let Some(last) = self.script.pop() {
            let w = self.widths.pop().expect("widths track script");
            if last + 1 < w {
                self.script.push(last + 1);
                self.widths.push(w);
                self.pos = 0;
                self.weight = 1.0;
                return true;
            }
        }
        false
    }
}

impl Chance for Replay {
    fn reward(&mut self, arm: &ArmSpec) -> f64 {
        let atoms = arm.atoms().expect("oracle arms have finite support");
        let w: Vec<f64> = atoms.iter().map(|a| a.1).collect();
        atoms[self.choose(&w)].0
    }

    fn coin(&mut self, p: f64) -> bool {
        if p >= 1.0 {
            true
        } else if p <= 0.0 {
            false
        } else {
            self.choose(&[p, 1.0 - p]) == 0
        }
    }

    fn categorical(&mut self, p: &[f64]) -> usize {
        let idx: Vec<usize> = (0..p.len()).filter(|&i| p[i] > 0.0).collect();
        let w: Vec<f64> = idx.iter().map(|&i| p[i]).collect();
        idx[self.choose(&w)]
    }

    fn pick(&mut self, n: usize) -> usize {
        if n <= 1 {
            0
        } else {
            self.choose(&vec![1.0 / n as f64; n])
        }
    }
}

/// Exact expected pseudo-regret after `horizon` stages, by enumerating every
/// reward, arrival, passive draw and tie-break outcome with its probability.
/// Arms must have finite support.
pub fn brute_force_expected_regret(
    instance: &ProblemInstance,
    schedule: &FreeObsSchedule,
    observer: &ObserverMode,
    make_policy: &dyn Fn() -> Box<dyn Policy>,
    horizon: u64,
) -> Result<f64> {
    if let Some(i) = instance.arms().iter().position(|a| a.atoms().is_none()) {
        return Err(Error::InvalidArm {
            index: i,
            reason: "the exact oracle needs finite-support arms".into(),
        });
    }
    if horizon == 0 {
        return Ok(0.0);
    }
    let mut replay = Replay {
        script: Vec::new(),
        widths: Vec::new(),
        pos: 0,
        weight: 1.0,
    };
    let mut total = 0.0;
    let mut leaves = 0usize;
    loop {
        leaves += 1;
        if leaves > LEAF_BUDGET {
            return Err(Error::TooLarge {
                budget: LEAF_BUDGET,
            });
        }
        let mut policy = make_policy();
        let trace = run_episode(
            instance,
            schedule,
            observer,
            policy.as_mut(),
            horizon,
            &[horizon],
            &mut replay,
        )?;
        total += replay.weight * trace.final_regret();
        if !replay.advance() {
            break;
        }
    }
    Ok(total)
}
