//! Command-line entry point. Exit codes: 0 success, 1 configuration or
//! input error, 2 a check command found a failing row.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bounds::{bound_curves, BoundInputs, SubLogConstants};
use crate::concentration::{run_suite, Lemma, SuiteConfig};
use crate::environment::{FreeObsSchedule, ObserverMode};
use crate::error::{Error, Result};
use crate::harness::config::{
    load_config, passive_weights, Experiment, PassiveDistribution, PolicySpec,
};
use crate::harness::output::{bounds_csv, fmt_g10, stats_csv, write_file};
use crate::harness::run::run_replicated;
use crate::harness::sweep::sweep_epsilon;
use crate::harness::{brute_force_expected_regret, run_single};
use crate::instance::{ArmSpec, ProblemInstance};

#[derive(Debug, Parser)]
#[command(name = "freeobs", version, about = "Bandits with free observations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run every variant of a config and write `<out>/<variant>.csv`.
    Run(RunArgs),
    /// Final-stage regret for a list of free-observation rates.
    SweepEpsilon(SweepArgs),
    /// Lower and upper bound curves on the config's checkpoints.
    Bounds(BoundsArgs),
    /// Monte-Carlo checks of the concentration inequalities.
    ConcCheck(ConcArgs),
    /// Exact expected regret against Monte-Carlo on tiny horizons.
    OracleCheck(OracleArgs),
}

#[derive(Debug, Args)]
struct Common {
    /// JSON experiment config.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the config's master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[command(flatten)]
    common: Common,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    /// Comma-separated rates.
    #[arg(long, value_delimiter = ',', required = true)]
    eps: Vec<f64>,
    /// Output file (stdout if absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BoundsArgs {
    #[command(flatten)]
    common: Common,
    /// Variant whose instance and sampling law are used (default: first).
    #[arg(long)]
    variant: Option<String>,
    /// Constant in front of the active upper bound.
    #[arg(long, default_value_t = 1.0)]
    c_eta: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum LemmaArg {
    Maximal,
    Interval,
    Binomial,
    BinaryT2,
}

#[derive(Debug, Args)]
struct ConcArgs {
    /// Checks to run (default: all).
    #[arg(long, value_enum, value_delimiter = ',')]
    lemma: Vec<LemmaArg>,
    #[arg(long, value_delimiter = ',', default_values_t = [0.2, 0.1, 0.05, 0.01])]
    delta: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [100u64, 1000])]
    horizon: Vec<u64>,
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct OracleArgs {
    /// Config with finite-support arms; a built-in two-arm Bernoulli
    /// instance is used when absent.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = 6)]
    horizon: u64,
    #[arg(long, default_value_t = 1_000_000)]
    trials: u64,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Input(Error),
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e)
    }
}

fn io_err(path: &Path, e: std::io::Error) -> Failure {
    Failure::Input(Error::config(path.display().to_string(), e.to_string()))
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e}");
            1
        }
        Err(Failure::Check(msg)) => {
            eprintln!("check failed: {msg}");
            2
        }
    }
}

fn with_pool<R: Send>(
    jobs: Option<usize>,
    f: impl FnOnce() -> R + Send,
) -> std::result::Result<R, Failure> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| Failure::Input(Error::config("--jobs", e.to_string())))?;
    Ok(pool.install(f))
}

fn experiments(common: &Common) -> std::result::Result<Vec<Experiment>, Failure> {
    let path = common
        .config
        .as_ref()
        .ok_or_else(|| Error::config("--config", "a config file is required"))?;
    let mut exps = load_config(path)?.resolve()?;
    if let Some(s) = common.seed {
        exps.iter_mut().for_each(|e| e.seed = s);
    }
    Ok(exps)
}

fn emit(out: Option<&Path>, text: &str) -> std::result::Result<(), Failure> {
    match out {
        Some(p) => write_file(p, text).map_err(|e| io_err(p, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn dispatch(cmd: Command) -> std::result::Result<(), Failure> {
    match cmd {
        Command::Run(a) => {
            let exps = experiments(&a.common)?;
            for e in &exps {
                let stats = with_pool(a.common.jobs, || run_replicated(e))??;
                let path = a.out.join(format!("{}.csv", e.name));
                write_file(&path, &stats_csv(&stats)).map_err(|err| io_err(&path, err))?;
                println!("{}", path.display());
            }
            Ok(())
        }
        Command::SweepEpsilon(a) => {
            if let Some(e) = a.eps.iter().find(|e| !(**e > 0.0 && **e <= 1.0)) {
                return Err(
                    Error::config("--eps", format!("rates must lie in (0, 1], got {e}")).into(),
                );
            }
            let exps = experiments(&a.common)?;
            let mut text = String::from("variant,epsilon,mean,q10,q25,q75,q90\n");
            for e in &exps {
                let rows = with_pool(a.common.jobs, || sweep_epsilon(e, &a.eps))??;
                for r in rows {
                    text.push_str(&format!(
                        "{},{},{},{},{},{},{}\n",
                        e.name,
                        fmt_g10(r.epsilon),
                        fmt_g10(r.mean),
                        fmt_g10(r.q10),
                        fmt_g10(r.q25),
                        fmt_g10(r.q75),
                        fmt_g10(r.q90)
                    ));
                }
            }
            emit(a.out.as_deref(), &text)
        }
        Command::Bounds(a) => {
            let exps = experiments(&a.common)?;
            let e = match &a.variant {
                Some(v) => exps
                    .iter()
                    .find(|e| &e.name == v)
                    .ok_or_else(|| Error::config("--variant", format!("no variant named {v}")))?,
                None => &exps[0],
            };
            emit(a.out.as_deref(), &bounds_table(e, a.c_eta)?)
        }
        Command::ConcCheck(a) => {
            let lemmas = if a.lemma.is_empty() {
                Lemma::ALL.to_vec()
            } else {
                a.lemma
                    .iter()
                    .map(|l| match l {
                        LemmaArg::Maximal => Lemma::Maximal,
                        LemmaArg::Interval => Lemma::Interval,
                        LemmaArg::Binomial => Lemma::Binomial,
                        LemmaArg::BinaryT2 => Lemma::BinaryT2,
                    })
                    .collect()
            };
            let cfg = SuiteConfig {
                lemmas,
                deltas: a.delta,
                horizons: a.horizon,
                trials: a.trials,
                seed: a.seed,
            };
            let rows = with_pool(a.jobs, || run_suite(&cfg))??;
            let mut text = String::from("lemma,family,param,horizon,estimate,stderr,bound,pass\n");
            for r in &rows {
                text.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    r.lemma,
                    r.family,
                    fmt_g10(r.param),
                    r.horizon,
                    fmt_g10(r.estimate),
                    fmt_g10(r.stderr),
                    fmt_g10(r.bound),
                    r.pass
                ));
            }
            emit(a.out.as_deref(), &text)?;
            let failed = rows.iter().filter(|r| !r.pass).count();
            if failed > 0 {
                return Err(Failure::Check(format!(
                    "{failed} of {} rows exceed their bound",
                    rows.len()
                )));
            }
            Ok(())
        }
        Command::OracleCheck(a) => {
            let mut exps = match &a.config {
                Some(p) => load_config(p)?.resolve()?,
                None => default_oracle_experiments(),
            };
            for e in exps.iter_mut() {
                e.horizon = a.horizon;
                e.checkpoints = vec![a.horizon];
                e.replications = a.trials;
                if let Some(s) = a.seed {
                    e.seed = s;
                }
            }
            if a.horizon == 0 {
                return Err(Error::config("--horizon", "must be >= 1").into());
            }
            let mut text = String::from("variant,horizon,exact,mc_mean,mc_stderr,z,pass\n");
            let mut failed = 0;
            for e in &exps {
                let row = with_pool(a.jobs, || oracle_row(e))??;
                failed += usize::from(!row.pass);
                text.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    e.name,
                    e.horizon,
                    fmt_g10(row.exact),
                    fmt_g10(row.mean),
                    fmt_g10(row.stderr),
                    fmt_g10(row.z),
                    row.pass
                ));
            }
            emit(a.out.as_deref(), &text)?;
            if failed > 0 {
                return Err(Failure::Check(format!(
                    "{failed} variants disagree with the oracle"
                )));
            }
            Ok(())
        }
    }
}

/// Bounds over the experiment's checkpoints (those >= 3), using its rate and
/// passive law (uniform for an active observer).
pub fn bounds_table(e: &Experiment, c_eta: f64) -> Result<String> {
    let eps = match e.schedule {
        FreeObsSchedule::None => {
            return Err(Error::config(
                "schedule",
                "bounds need a positive free-observation rate",
            ))
        }
        s => s.epsilon(),
    };
    let p = match &e.observer {
        ObserverMode::Passive(p) => p.clone(),
        ObserverMode::Active => passive_weights(PassiveDistribution::Uniform, &e.instance)?,
    };
    let rho = match e.policy {
        PolicySpec::EtcOcucb(a) => a.rho,
        _ => 0.5,
    };
    let stages: Vec<u64> = e.checkpoints.iter().copied().filter(|&t| t >= 3).collect();
    let curves = bound_curves(
        &stages,
        &BoundInputs {
            gaps: e.instance.gaps(),
            eps,
            p: &p,
            rho,
            c_eta,
            consts: SubLogConstants::default(),
        },
    )
    .map_err(|err| Error::config("arms", err.to_string()))?;
    bounds_csv(&curves)
}

/// Built-in oracle cases: FTL-robin with round-robin free observations and
/// UCB with uniform passive observations on Bernoulli(0.9) vs Bernoulli(0.1),
/// one free observation every other stage.
pub fn default_oracle_experiments() -> Vec<Experiment> {
    let instance = ProblemInstance::new(vec![
        ArmSpec::Bernoulli { mean: 0.9 },
        ArmSpec::Bernoulli { mean: 0.1 },
    ])
    .expect("valid instance");
    let schedule = FreeObsSchedule::Deterministic(0.5);
    let base = Experiment {
        name: String::new(),
        instance,
        schedule,
        observer: ObserverMode::Active,
        policy: PolicySpec::FtlRobin,
        horizon: 6,
        replications: 1_000_000,
        seed: 0,
        checkpoints: vec![6],
    };
    vec![
        Experiment {
            name: "ftl_robin".into(),
            ..base.clone()
        },
        Experiment {
            name: "ucb_passive".into(),
            observer: ObserverMode::Passive(vec![0.5, 0.5]),
            policy: PolicySpec::UcbPassive,
            ..base
        },
    ]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleRow {
    pub exact: f64,
    pub mean: f64,
    pub stderr: f64,
    pub z: f64,
    pub pass: bool,
}

/// Exact expectation vs the sample mean over `e.replications` runs; passes
/// within 3 standard errors.
pub fn oracle_row(e: &Experiment) -> Result<OracleRow> {
    use rayon::prelude::*;
    let k = e.instance.k();
    let exact = brute_force_expected_regret(
        &e.instance,
        &e.schedule,
        &e.observer,
        &|| e.policy.build(k),
        e.horizon,
    )?;
    let xs: Vec<f64> = (0..e.replications)
        .into_par_iter()
        .map(|i| run_single(e, i).map(|t| t.final_regret()))
        .collect::<Result<_>>()?;
    let s1: f64 = xs.iter().sum();
    let s2: f64 = xs.iter().map(|x| x * x).sum();
    let n = e.replications as f64;
    let mean = s1 / n;
    let var = (s2 / n - mean * mean).max(0.0) * n / (n - 1.0).max(1.0);
    let stderr = (var / n).sqrt();
    let z = if stderr > 0.0 {
        (mean - exact) / stderr
    } else {
        0.0
    };
    let pass = (mean - exact).abs() <= 3.0 * stderr + 1e-12;
    Ok(OracleRow {
        exact,
        mean,
        stderr,
        z,
        pass,
    })
}
