use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn unit_variance() -> f64 {
    1.0
}

/// Reward distribution of a single arm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ArmSpec {
    Gaussian {
        mean: f64,
        #[serde(default = "unit_variance")]
        variance: f64,
    },
    Bernoulli {
        mean: f64,
    },
    PointMass {
        value: f64,
    },
}

impl ArmSpec {
    pub fn gaussian(mean: f64) -> Self {
        ArmSpec::Gaussian {
            mean,
            variance: 1.0,
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            ArmSpec::Gaussian { mean, .. } | ArmSpec::Bernoulli { mean } => mean,
            ArmSpec::PointMass { value } => value,
        }
    }

    pub fn validate(&self) -> std::result::Result<(), String> {
        match *self {
            ArmSpec::Gaussian { mean, variance } => {
                if !mean.is_finite() {
                    return Err(format!("gaussian mean must be finite, got {mean}"));
                }
                if !(variance > 0.0 && variance.is_finite()) {
                    return Err(format!(
                        "gaussian variance must be positive, got {variance}"
                    ));
                }
            }
            ArmSpec::Bernoulli { mean } => {
                if !(0.0..=1.0).contains(&mean) {
                    return Err(format!("bernoulli mean must lie in [0, 1], got {mean}"));
                }
            }
            ArmSpec::PointMass { value } => {
                if !value.is_finite() {
                    return Err(format!("point mass value must be finite, got {value}"));
                }
            }
        }
        Ok(())
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            ArmSpec::Gaussian { mean, variance } => {
                let z: f64 = rng.sample(StandardNormal);
                mean + variance.sqrt() * z
            }
            ArmSpec::Bernoulli { mean } => {
                if rng.random::<f64>() < mean {
                    1.0
                } else {
                    0.0
                }
            }
            ArmSpec::PointMass { value } => value,
        }
    }

    /// Atoms `(value, probability)` with positive probability, or `None` for
    /// continuous arms.
    pub fn atoms(&self) -> Option<Vec<(f64, f64)>> {
        match *self {
            ArmSpec::Gaussian { .. } => None,
            ArmSpec::PointMass { value } => Some(vec![(value, 1.0)]),
            ArmSpec::Bernoulli { mean } => Some(
                [(1.0, mean), (0.0, 1.0 - mean)]
                    .into_iter()
                    .filter(|&(_, w)| w > 0.0)
                    .collect(),
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    arms: Vec<ArmSpec>,
    means: Vec<f64>,
    mu_star: f64,
    gaps: Vec<f64>,
}

impl ProblemInstance {
    pub fn new(arms: Vec<ArmSpec>) -> Result<Self> {
        if arms.len() < 2 {
            return Err(Error::EmptyInstance(arms.len()));
        }
        for (index, arm) in arms.iter().enumerate() {
            arm.validate()
                .map_err(|reason| Error::InvalidArm { index, reason })?;
        }
        let means: Vec<f64> = arms.iter().map(ArmSpec::mean).collect();
        let mu_star = means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let gaps = means.iter().map(|m| mu_star - m).collect();
        Ok(Self {
            arms,
            means,
            mu_star,
            gaps,
        })
    }

    pub fn k(&self) -> usize {
        self.arms.len()
    }

    pub fn arms(&self) -> &[ArmSpec] {
        &self.arms
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn mu_star(&self) -> f64 {
        self.mu_star
    }

    pub fn gaps(&self) -> &[f64] {
        &self.gaps
    }

    /// First arm attaining `mu_star`.
    pub fn best_arm(&self) -> usize {
        self.gaps.iter().position(|&g| g == 0.0).unwrap_or(0)
    }

    fn check(&self, arm: usize) -> Result<()> {
        if arm < self.k() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index: arm,
                len: self.k(),
            })
        }
    }

    pub fn sample_reward<R: Rng + ?Sized>(&self, arm: usize, rng: &mut R) -> Result<f64> {
        self.check(arm)?;
        Ok(self.arms[arm].sample(rng))
    }

    pub fn pseudo_regret_increment(&self, arm: usize) -> Result<f64> {
        self.check(arm)?;
        Ok(self.gaps[arm])
    }

    /// `sum_i gap_i * pulls_i`.
    pub fn pseudo_regret(&self, pulls: &[u64]) -> f64 {
        self.gaps
            .iter()
            .zip(pulls)
            .map(|(g, &n)| g * n as f64)
            .sum()
    }

    /// Same arms with every reward shifted by `c`.
    pub fn shifted(&self, c: f64) -> Result<Self> {
        let arms = self
            .arms
            .iter()
            .map(|a| match *a {
                ArmSpec::Gaussian { mean, variance } => Ok(ArmSpec::Gaussian {
                    mean: mean + c,
                    variance,
                }),
                ArmSpec::PointMass { value } => Ok(ArmSpec::PointMass { value: value + c }),
                ArmSpec::Bernoulli { .. } => Err(Error::domain(
                    "bernoulli arms cannot be shifted and stay bernoulli",
                )),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(arms)
    }
}
