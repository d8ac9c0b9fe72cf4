use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bounds::optimal_passive_distribution;
use crate::environment::{validate_distribution, FreeObsSchedule, ObserverMode};
use crate::error::{Error, Result};
use crate::instance::{ArmSpec, ProblemInstance};
use crate::policy::{
    ActiveParams, CheckCadence, EtcOcucb, FtlRobin, OcucbDenominator, Policy, Ucb, Ucb1Double,
};
use crate::sim::validate_checkpoints;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub name: String,
    pub arms: Vec<ArmSpec>,
    #[serde(default)]
    pub schedule: ScheduleConfig,
    pub observer: ObserverConfig,
    pub policy: PolicyConfig,
    pub horizon: u64,
    pub replications: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checkpoints: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub variants: Vec<VariantConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleKind {
    #[default]
    None,
    Deterministic,
    StaticRandom,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleConfig {
    pub kind: ScheduleKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObserverKind {
    Passive,
    Active,
}

/// Named passive sampling laws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PassiveDistribution {
    Uniform,
    /// Proportional to `1/gap` on sub-optimal arms.
    Optimal,
    /// Proportional to `1/gap^2` on sub-optimal arms.
    InverseSquareGap,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObserverConfig {
    pub kind: ObserverKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distribution: Option<PassiveDistribution>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyName {
    UcbPassive,
    UcbBaseline,
    FtlRobin,
    Ucb1Double,
    EtcOcucb,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CadenceKind {
    EveryRound,
    EveryCRounds,
    PowersOfTwo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CadenceConfig {
    pub kind: CadenceKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DenominatorConfig {
    Own,
    Other,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyConfig {
    pub name: PolicyName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epoch_base: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub share_info: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cadence: Option<CadenceConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ocucb_denominator: Option<DenominatorConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariantConfig {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<ScheduleConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observer: Option<ObserverConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub policy: Option<PolicyConfig>,
}

/// Validated policy choice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PolicySpec {
    UcbPassive,
    UcbBaseline,
    FtlRobin,
    Ucb1Double,
    EtcOcucb(ActiveParams),
}

impl PolicySpec {
    pub fn build(&self, k: usize) -> Box<dyn Policy> {
        match *self {
            PolicySpec::UcbPassive => Box::new(Ucb::passive(k)),
            PolicySpec::UcbBaseline => Box::new(Ucb::baseline(k)),
            PolicySpec::FtlRobin => Box::new(FtlRobin::new(k)),
            PolicySpec::Ucb1Double => Box::new(Ucb1Double::new(k)),
            PolicySpec::EtcOcucb(p) => Box::new(EtcOcucb::new(k, p)),
        }
    }

    pub fn requests_free(&self) -> bool {
        !matches!(self, PolicySpec::UcbPassive | PolicySpec::UcbBaseline)
    }
}

/// One fully validated experiment (a config or one of its variants).
#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub name: String,
    pub instance: ProblemInstance,
    pub schedule: FreeObsSchedule,
    pub observer: ObserverMode,
    pub policy: PolicySpec,
    pub horizon: u64,
    pub replications: u64,
    pub seed: u64,
    pub checkpoints: Vec<u64>,
}

/// About 100 log-spaced stages in `[1, T]`, always ending at `T`.
pub fn default_checkpoints(horizon: u64) -> Vec<u64> {
    if horizon == 0 {
        return Vec::new();
    }
    let lt = (horizon as f64).ln();
    let mut v: Vec<u64> = (0..100)
        .map(|k| ((lt * k as f64 / 99.0).exp().round() as u64).clamp(1, horizon))
        .collect();
    v.push(horizon);
    v.dedup();
    v
}

pub fn parse_config(json: &str) -> Result<ExperimentConfig> {
    let de = &mut serde_json::Deserializer::from_str(json);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::config(
            if path.is_empty() { ".".into() } else { path },
            e.into_inner().to_string(),
        )
    })
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::config(path.display().to_string(), e.to_string()))?;
    parse_config(&text)
}

fn resolve_schedule(s: &ScheduleConfig, at: &str) -> Result<FreeObsSchedule> {
    let need_eps = || {
        s.epsilon.ok_or_else(|| {
            Error::config(format!("{at}.epsilon"), "required for this schedule kind")
        })
    };
    let wrap = |r: Result<FreeObsSchedule>| {
        r.map_err(|e| Error::config(format!("{at}.epsilon"), e.to_string()))
    };
    match s.kind {
        ScheduleKind::None => {
            if s.epsilon.is_some() {
                return Err(Error::config(
                    format!("{at}.epsilon"),
                    "not allowed with kind none",
                ));
            }
            Ok(FreeObsSchedule::None)
        }
        ScheduleKind::Deterministic => wrap(FreeObsSchedule::deterministic(need_eps()?)),
        ScheduleKind::StaticRandom => wrap(FreeObsSchedule::static_random(need_eps()?)),
    }
}

fn normalised(w: Vec<f64>) -> Vec<f64> {
    let z: f64 = w.iter().sum();
    w.into_iter().map(|x| x / z).collect()
}

pub fn passive_weights(dist: PassiveDistribution, inst: &ProblemInstance) -> Result<Vec<f64>> {
    let k = inst.k();
    match dist {
        PassiveDistribution::Uniform => Ok(vec![1.0 / k as f64; k]),
        PassiveDistribution::Optimal => optimal_passive_distribution(inst.gaps()),
        PassiveDistribution::InverseSquareGap => {
            // validates the gap structure
            optimal_passive_distribution(inst.gaps())?;
            Ok(normalised(
                inst.gaps()
                    .iter()
                    .map(|&g| if g > 0.0 { 1.0 / (g * g) } else { 0.0 })
                    .collect(),
            ))
        }
    }
}

fn resolve_observer(o: &ObserverConfig, inst: &ProblemInstance, at: &str) -> Result<ObserverMode> {
    match o.kind {
        ObserverKind::Active => {
            if o.p.is_some() || o.distribution.is_some() {
                return Err(Error::config(
                    at,
                    "an active observer takes no sampling law",
                ));
            }
            Ok(ObserverMode::Active)
        }
        ObserverKind::Passive => {
            let p = match (&o.p, o.distribution) {
                (Some(p), None) => {
                    if p.len() != inst.k() {
                        return Err(Error::config(
                            format!("{at}.p"),
                            format!("{} weights for {} arms", p.len(), inst.k()),
                        ));
                    }
                    validate_distribution(p)
                        .map_err(|e| Error::config(format!("{at}.p"), e.to_string()))?;
                    p.clone()
                }
                (None, Some(d)) => passive_weights(d, inst)
                    .map_err(|e| Error::config(format!("{at}.distribution"), e.to_string()))?,
                (None, None) => vec![1.0 / inst.k() as f64; inst.k()],
                (Some(_), Some(_)) => {
                    return Err(Error::config(
                        at,
                        "give either `p` or `distribution`, not both",
                    ))
                }
            };
            Ok(ObserverMode::Passive(p))
        }
    }
}

fn resolve_policy(p: &PolicyConfig, at: &str) -> Result<PolicySpec> {
    let bad = |field: &str, msg: &str| Error::config(format!("{at}.{field}"), msg.to_string());
    if p.name != PolicyName::EtcOcucb {
        let extra = [
            ("alpha", p.alpha.is_some()),
            ("rho", p.rho.is_some()),
            ("eta", p.eta.is_some()),
            ("epoch_base", p.epoch_base.is_some()),
            ("share_info", p.share_info.is_some()),
            ("cadence", p.cadence.is_some()),
            ("ocucb_denominator", p.ocucb_denominator.is_some()),
        ];
        if let Some((f, _)) = extra.iter().find(|(_, set)| *set) {
            return Err(bad(f, "only used by etc_ocucb"));
        }
    }
    Ok(match p.name {
        PolicyName::UcbPassive => PolicySpec::UcbPassive,
        PolicyName::UcbBaseline => PolicySpec::UcbBaseline,
        PolicyName::FtlRobin => PolicySpec::FtlRobin,
        PolicyName::Ucb1Double => PolicySpec::Ucb1Double,
        PolicyName::EtcOcucb => {
            let mut a = ActiveParams::default();
            if let Some(x) = p.alpha {
                if !(x >= 1.0 && x.is_finite()) {
                    return Err(bad("alpha", "must be >= 1"));
                }
                a.alpha = x;
            }
            if let Some(x) = p.rho {
                if !(0.5..=1.0).contains(&x) {
                    return Err(bad("rho", "must lie in [1/2, 1]"));
                }
                a.rho = x;
            }
            if let Some(x) = p.eta {
                if !(x > 1.0 && x.is_finite()) {
                    return Err(bad("eta", "must be > 1"));
                }
                a.eta = x;
            }
            if let Some(x) = p.epoch_base {
                if x < 2 {
                    return Err(bad("epoch_base", "must be >= 2"));
                }
                a.epoch_base = x;
            }
            if let Some(x) = p.share_info {
                a.share_info = x;
            }
            if let Some(c) = p.cadence {
                a.cadence = match (c.kind, c.c) {
                    (CadenceKind::EveryRound, None) => CheckCadence::EveryRound,
                    (CadenceKind::PowersOfTwo, None) => CheckCadence::PowersOfTwo,
                    (CadenceKind::EveryCRounds, Some(n)) if n >= 1 => CheckCadence::EveryCRounds(n),
                    (CadenceKind::EveryCRounds, _) => {
                        return Err(bad("cadence.c", "every_c_rounds needs c >= 1"))
                    }
                    (_, Some(_)) => return Err(bad("cadence.c", "only used by every_c_rounds")),
                };
            }
            if let Some(d) = p.ocucb_denominator {
                a.denominator = match d {
                    DenominatorConfig::Own => OcucbDenominator::Own,
                    DenominatorConfig::Other => OcucbDenominator::Other,
                };
            }
            PolicySpec::EtcOcucb(a)
        }
    })
}

impl ExperimentConfig {
    /// Validates the config and expands variants. Without variants the
    /// result is a single experiment named after the config.
    pub fn resolve(&self) -> Result<Vec<Experiment>> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::config(
                "schema_version",
                format!(
                    "unsupported version {}, expected {SCHEMA_VERSION}",
                    self.schema_version
                ),
            ));
        }
        let instance = ProblemInstance::new(self.arms.clone()).map_err(|e| {
            let path = match &e {
                Error::InvalidArm { index, .. } => format!("arms[{index}]"),
                _ => "arms".into(),
            };
            Error::config(path, e.to_string())
        })?;
        if self.horizon == 0 {
            return Err(Error::config("horizon", "must be >= 1"));
        }
        if self.replications == 0 {
            return Err(Error::config("replications", "must be >= 1"));
        }
        let checkpoints = match &self.checkpoints {
            Some(c) => {
                if c.is_empty() {
                    return Err(Error::config("checkpoints", "must not be empty"));
                }
                validate_checkpoints(c, self.horizon)?;
                c.clone()
            }
            None => default_checkpoints(self.horizon),
        };
        let base = [VariantConfig {
            name: self.name.clone(),
            schedule: None,
            observer: None,
            policy: None,
        }];
        let variants = if self.variants.is_empty() {
            &base[..]
        } else {
            &self.variants[..]
        };
        let mut names = std::collections::BTreeSet::new();
        variants
            .iter()
            .enumerate()
            .map(|(n, v)| {
                let at = |f: &str| {
                    if self.variants.is_empty() {
                        f.to_string()
                    } else {
                        format!("variants[{n}].{f}")
                    }
                };
                if !valid_name(&v.name) {
                    return Err(Error::config(
                        at("name"),
                        "use letters, digits, '-', '_' or '.' only",
                    ));
                }
                if !names.insert(v.name.clone()) {
                    return Err(Error::config(at("name"), "duplicate variant name"));
                }
                let (s_at, s) = match &v.schedule {
                    Some(s) => (at("schedule"), s),
                    None => ("schedule".to_string(), &self.schedule),
                };
                let (o_at, o) = match &v.observer {
                    Some(o) => (at("observer"), o),
                    None => ("observer".to_string(), &self.observer),
                };
                let (p_at, p) = match &v.policy {
                    Some(p) => (at("policy"), p),
                    None => ("policy".to_string(), &self.policy),
                };
                let schedule = resolve_schedule(s, &s_at)?;
                let observer = resolve_observer(o, &instance, &o_at)?;
                let policy = resolve_policy(p, &p_at)?;
                if observer == ObserverMode::Active && !policy.requests_free() {
                    return Err(Error::config(
                        o_at,
                        "an active observer needs a policy that chooses free observations",
                    ));
                }
                Ok(Experiment {
                    name: v.name.clone(),
                    instance: instance.clone(),
                    schedule,
                    observer,
                    policy,
                    horizon: self.horizon,
                    replications: self.replications,
                    seed: self.seed,
                    checkpoints: checkpoints.clone(),
                })
            })
            .collect()
    }
}

fn valid_name(s: &str) -> bool {
    !s.is_empty()
        && s != "."
        && s != ".."
        && s.chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'))
}
