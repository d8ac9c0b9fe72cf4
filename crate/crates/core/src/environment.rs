use crate::error::{Error, Result};
use crate::rng::Chance;

/// When free observations arrive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FreeObsSchedule {
    None,
    /// Evenly spaced: exactly `floor(eps * T)` arrivals in the first `T` stages.
    Deterministic(f64),
    /// Independent Bernoulli(eps) arrivals.
    StaticRandom(f64),
}

impl FreeObsSchedule {
    pub fn deterministic(eps: f64) -> Result<Self> {
        check_eps(eps).map(|_| FreeObsSchedule::Deterministic(eps))
    }

    pub fn static_random(eps: f64) -> Result<Self> {
        check_eps(eps).map(|_| FreeObsSchedule::StaticRandom(eps))
    }

    pub fn epsilon(&self) -> f64 {
        match *self {
            FreeObsSchedule::None => 0.0,
            FreeObsSchedule::Deterministic(e) | FreeObsSchedule::StaticRandom(e) => e,
        }
    }

    /// Draws `Z_t` for stage `t >= 1`.
    pub fn available(&self, t: u64, chance: &mut dyn Chance) -> bool {
        match *self {
            FreeObsSchedule::None => false,
            FreeObsSchedule::Deterministic(eps) => {
                deterministic_arrivals(eps, t) > deterministic_arrivals(eps, t.saturating_sub(1))
            }
            FreeObsSchedule::StaticRandom(eps) => chance.coin(eps),
        }
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps <= 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "epsilon must lie in (0, 1], got {eps}"
        )))
    }
}

/// `floor(eps * t)`, robust to products such as `0.57 * 100` landing one ulp
/// below an integer.
pub fn deterministic_arrivals(eps: f64, t: u64) -> u64 {
    let x = eps * t as f64;
    (x * (1.0 + 4.0 * f64::EPSILON)).floor() as u64
}

/// Who picks the freely observed arm.
#[derive(Debug, Clone, PartialEq)]
pub enum ObserverMode {
    Passive(Vec<f64>),
    Active,
}

impl ObserverMode {
    pub fn passive(p: Vec<f64>) -> Result<Self> {
        validate_distribution(&p)?;
        Ok(ObserverMode::Passive(p))
    }
}

pub fn validate_distribution(p: &[f64]) -> Result<()> {
    if p.is_empty() {
        return Err(Error::InvalidDistribution(
            "empty probability vector".into(),
        ));
    }
    if let Some(w) = p.iter().find(|w| !(**w >= 0.0 && w.is_finite())) {
        return Err(Error::InvalidDistribution(format!(
            "negative or non-finite weight {w}"
        )));
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidDistribution(format!(
            "weights sum to {s}, not 1"
        )));
    }
    Ok(())
}

/// Samples `f_t` from `p`.
pub fn passive_draw(p: &[f64], chance: &mut dyn Chance) -> Result<usize> {
    validate_distribution(p)?;
    Ok(chance.categorical(p))
}
