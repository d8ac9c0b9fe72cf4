//! Deviation thresholds for running means of sub-Gaussian increments and
//! Monte-Carlo checks that the corresponding crossing probabilities respect
//! their analytic bounds.

use rand::Rng;
use rand_distr::{Binomial, Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::RngStream;

const CHUNK: u64 = 4096;

/// Increment law of the simulated martingale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Increment {
    Gaussian {
        sigma2: f64,
    },
    /// `B - p` with `B ~ Bernoulli(p)`; sub-Gaussian with proxy `1/4`.
    CenteredBernoulli {
        p: f64,
    },
}

impl Increment {
    pub fn sigma2(&self) -> f64 {
        match *self {
            Increment::Gaussian { sigma2 } => sigma2,
            Increment::CenteredBernoulli { .. } => 0.25,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Increment::Gaussian { .. } => "gaussian",
            Increment::CenteredBernoulli { .. } => "bernoulli",
        }
    }

    fn draw(&self, rng: &mut RngStream) -> f64 {
        match *self {
            Increment::Gaussian { sigma2 } => sigma2.sqrt() * rng.sample::<f64, _>(StandardNormal),
            Increment::CenteredBernoulli { p } => {
                if rng.random::<f64>() < p {
                    1.0 - p
                } else {
                    -p
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MartingaleSpec {
    pub increment: Increment,
    pub horizon: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub trials: u64,
}

impl McEstimate {
    fn from_hits(hits: u64, trials: u64) -> Self {
        let p = hits as f64 / trials as f64;
        Self {
            estimate: p,
            stderr: (p * (1.0 - p) / trials as f64).sqrt(),
            trials,
        }
    }

    /// `estimate - 3 stderr <= bound`.
    pub fn respects(&self, bound: f64) -> bool {
        self.estimate - 3.0 * self.stderr <= bound
    }
}

/// `sqrt((2 sigma2 / t) ln(T / (delta t)))` without argument checks; the
/// log is clamped at 0.
pub fn maximal_radius(t: f64, horizon: f64, delta: f64, sigma2: f64) -> f64 {
    ((2.0 * sigma2 / t) * (horizon / (delta * t)).ln().max(0.0)).sqrt()
}

pub fn maximal_threshold(t: u64, horizon: u64, delta: f64, sigma2: f64) -> Result<f64> {
    if t == 0 || t > horizon {
        return Err(Error::domain(format!(
            "need 1 <= t <= T, got t={t}, T={horizon}"
        )));
    }
    if !(delta > 0.0 && delta <= 0.2) {
        return Err(Error::domain(format!(
            "need delta in (0, 0.2], got {delta}"
        )));
    }
    if !(sigma2 > 0.0) {
        return Err(Error::domain("sigma2 must be positive"));
    }
    Ok(maximal_radius(t as f64, horizon as f64, delta, sigma2))
}

/// `6 delta sqrt(ln(1/delta))`.
pub fn maximal_bound(delta: f64) -> f64 {
    6.0 * delta * (1.0 / delta).ln().sqrt()
}

/// Limiting constant of the maximal inequality as `delta -> 0`; reported for
/// reference only.
pub fn asymptotic_constant() -> f64 {
    (std::f64::consts::E / 8.0).sqrt()
}

fn check_trials(trials: u64) -> Result<()> {
    if trials < 10_000 {
        return Err(Error::domain(format!(
            "need at least 10^4 trials, got {trials}"
        )));
    }
    Ok(())
}

/// Runs `trials` paths in parallel chunks; `path` returns a hit vector for one
/// path given its stream. Hits are summed, so the result does not depend on
/// scheduling.
fn mc_hits<F>(trials: u64, seed: u64, width: usize, path: F) -> Vec<u64>
where
    F: Fn(&mut RngStream, &mut [bool]) + Sync,
{
    let chunks = trials.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = RngStream::new(seed, c);
            let n = CHUNK.min(trials - c * CHUNK);
            let mut hits = vec![0u64; width];
            let mut flags = vec![false; width];
            for _ in 0..n {
                flags.iter_mut().for_each(|f| *f = false);
                path(&mut rng, &mut flags);
                for (h, &f) in hits.iter_mut().zip(&flags) {
                    *h += f as u64;
                }
            }
            hits
        })
        .reduce(
            || vec![0u64; width],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        )
}

/// Fraction of paths on which the running mean reaches the maximal threshold
/// at some `t <= T`, for each `delta` (all on the same paths).
pub fn mc_crossing_probabilities(
    spec: &MartingaleSpec,
    deltas: &[f64],
    trials: u64,
    seed: u64,
) -> Result<Vec<McEstimate>> {
    check_trials(trials)?;
    let s2 = spec.increment.sigma2();
    let t_max = spec.horizon;
    // sum threshold: t * radius(t)
    let levels: Vec<Vec<f64>> = deltas
        .iter()
        .map(|&d| {
            (1..=t_max)
                .map(|t| maximal_threshold(t, t_max, d, s2).map(|r| t as f64 * r))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    let inc = spec.increment;
    let hits = mc_hits(trials, seed, deltas.len(), |rng, flags| {
        let mut s = 0.0;
        for t in 0..t_max as usize {
            s += inc.draw(rng);
            for (f, lv) in flags.iter_mut().zip(&levels) {
                if !*f && s >= lv[t] {
                    *f = true;
                }
            }
        }
    });
    Ok(hits
        .into_iter()
        .map(|h| McEstimate::from_hits(h, trials))
        .collect())
}

pub fn mc_crossing_probability(
    spec: &MartingaleSpec,
    delta: f64,
    trials: u64,
    seed: u64,
) -> Result<McEstimate> {
    Ok(mc_crossing_probabilities(spec, &[delta], trials, seed)?[0])
}

/// `(1 + x + 2 sqrt x) / (4 sqrt x)`.
pub fn phi(x: f64) -> f64 {
    let r = x.sqrt();
    (1.0 + x + 2.0 * r) / (4.0 * r)
}

/// `sqrt((2 sigma2 / t) ln(1/delta) phi(T2/T1))`.
pub fn interval_threshold(t: u64, t1: u64, t2: u64, delta: f64, sigma2: f64) -> Result<f64> {
    if !(t1 >= 1 && t1 <= t2 && t >= t1 && t <= t2) {
        return Err(Error::domain(format!(
            "need 1 <= T1 <= t <= T2, got t={t}, T1={t1}, T2={t2}"
        )));
    }
    if !(delta > 0.0 && delta < 1.0 && sigma2 > 0.0) {
        return Err(Error::domain("need delta in (0, 1) and sigma2 > 0"));
    }
    Ok(((2.0 * sigma2 / t as f64) * (1.0 / delta).ln() * phi(t2 as f64 / t1 as f64)).sqrt())
}

/// Crossing frequency of the interval threshold on `[T1, spec.horizon]`;
/// the analytic bound is `delta`.
pub fn mc_interval_crossing(
    spec: &MartingaleSpec,
    t1: u64,
    deltas: &[f64],
    trials: u64,
    seed: u64,
) -> Result<Vec<McEstimate>> {
    check_trials(trials)?;
    let t2 = spec.horizon;
    let s2 = spec.increment.sigma2();
    let levels: Vec<Vec<f64>> = deltas
        .iter()
        .map(|&d| {
            (t1..=t2)
                .map(|t| interval_threshold(t, t1, t2, d, s2).map(|r| t as f64 * r))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    let inc = spec.increment;
    let hits = mc_hits(trials, seed, deltas.len(), |rng, flags| {
        let mut s = 0.0;
        for t in 1..=t2 {
            s += inc.draw(rng);
            if t >= t1 {
                let k = (t - t1) as usize;
                for (f, lv) in flags.iter_mut().zip(&levels) {
                    if !*f && s >= lv[k] {
                        *f = true;
                    }
                }
            }
        }
    });
    Ok(hits
        .into_iter()
        .map(|h| McEstimate::from_hits(h, trials))
        .collect())
}

/// Bernoulli relative entropy `kl(x, p)`.
pub fn kl_bernoulli(x: f64, p: f64) -> f64 {
    let a = if x == 0.0 { 0.0 } else { x * (x / p).ln() };
    let b = if x == 1.0 {
        0.0
    } else {
        (1.0 - x) * ((1.0 - x) / (1.0 - p)).ln()
    };
    a + b
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinomialTailBound {
    /// `exp(-n kl(p - alpha, p))`.
    pub kl: f64,
    /// `exp(-n alpha^2 / (2 p (1 - p)))`, valid for `p <= 1/2`.
    pub simplified: Option<f64>,
}

/// Bounds on `P{S_n - n p <= -n alpha}` for a sum of `n` independent
/// Bernoulli variables with average mean `p`.
pub fn binomial_lower_tail_bound(n: u64, p: f64, alpha: f64) -> Result<BinomialTailBound> {
    if !(p > 0.0 && p < 1.0) || !(alpha >= 0.0) {
        return Err(Error::domain(format!(
            "need p in (0, 1) and alpha >= 0, got p={p}, alpha={alpha}"
        )));
    }
    let nf = n as f64;
    if alpha > p {
        return Ok(BinomialTailBound {
            kl: 0.0,
            simplified: (p <= 0.5).then_some(0.0),
        });
    }
    Ok(BinomialTailBound {
        kl: (-nf * kl_bernoulli(p - alpha, p)).exp(),
        simplified: (p <= 0.5).then(|| (-nf * alpha * alpha / (2.0 * p * (1.0 - p))).exp()),
    })
}

/// Frequency of `S_n - sum p_i <= -n alpha` for independent Bernoulli(p_i).
pub fn mc_binomial_lower_tail(
    ps: &[f64],
    alpha: f64,
    trials: u64,
    seed: u64,
) -> Result<McEstimate> {
    check_trials(trials)?;
    if ps.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(Error::domain("success probabilities must lie in [0, 1]"));
    }
    let n = ps.len() as f64;
    let cut = ps.iter().sum::<f64>() - n * alpha;
    let hits = mc_hits(trials, seed, 1, |rng, flags| {
        let s: f64 = ps
            .iter()
            .map(|&p| (rng.random::<f64>() < p) as u8 as f64)
            .sum();
        flags[0] = s <= cut + 1e-9;
    });
    Ok(McEstimate::from_hits(hits[0], trials))
}

/// `C ln t - p t + sqrt(5 p t ln t)`.
pub fn binary_t2_threshold(p: f64, t: u64, c: f64) -> f64 {
    let tf = t as f64;
    c * tf.ln() - p * tf + (5.0 * p * tf * tf.ln()).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub estimate: f64,
    pub stderr: f64,
    pub bound: f64,
    pub pass: bool,
}

/// Checks `P{C ln t - sum Z_s > threshold} <= 1/t^2` for `Z_s ~ Bernoulli(p)`.
pub fn binary_t2_check(p: f64, t: u64, c: f64, trials: u64, seed: u64) -> Result<CheckOutcome> {
    check_trials(trials)?;
    if !(0.0..=1.0).contains(&p) || t < 2 {
        return Err(Error::domain("need p in [0, 1] and t >= 2"));
    }
    let thr = binary_t2_threshold(p, t, c);
    let y0 = c * (t as f64).ln();
    let hits = if p == 0.0 {
        vec![u64::from(y0 > thr) * trials]
    } else {
        let bin = Binomial::new(t, p).map_err(|e| Error::domain(e.to_string()))?;
        mc_hits(trials, seed, 1, |rng, flags| {
            let s = bin.sample(rng) as f64;
            flags[0] = y0 - s > thr;
        })
    };
    let est = McEstimate::from_hits(hits[0], trials);
    let bound = 1.0 / (t as f64).powi(2);
    Ok(CheckOutcome {
        estimate: est.estimate,
        stderr: est.stderr,
        bound,
        pass: est.respects(bound),
    })
}

/// Which inequalities a suite run covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Lemma {
    Maximal,
    Interval,
    Binomial,
    BinaryT2,
}

impl Lemma {
    pub const ALL: [Lemma; 4] = [
        Lemma::Maximal,
        Lemma::Interval,
        Lemma::Binomial,
        Lemma::BinaryT2,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Lemma::Maximal => "maximal",
            Lemma::Interval => "interval",
            Lemma::Binomial => "binomial",
            Lemma::BinaryT2 => "binary-t2",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub lemmas: Vec<Lemma>,
    pub deltas: Vec<f64>,
    pub horizons: Vec<u64>,
    pub trials: u64,
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            lemmas: Lemma::ALL.to_vec(),
            deltas: vec![0.2, 0.1, 0.05, 0.01],
            horizons: vec![100, 1000],
            trials: 100_000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteRow {
    pub lemma: &'static str,
    pub family: String,
    /// `delta` for the crossing lemmas and the tail level of the binomial
    /// check; the success probability `p` for the binary check.
    pub param: f64,
    pub horizon: u64,
    pub estimate: f64,
    pub stderr: f64,
    pub bound: f64,
    pub pass: bool,
}

fn sub_seed(seed: u64, tag: u64) -> u64 {
    seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Runs every selected check over the `delta x T` grid with both increment
/// families.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Vec<SuiteRow>> {
    let families = [
        Increment::Gaussian { sigma2: 1.0 },
        Increment::CenteredBernoulli { p: 0.5 },
    ];
    let mut rows = Vec::new();
    let mut tag = 0u64;
    for &lemma in &cfg.lemmas {
        for &t in &cfg.horizons {
            match lemma {
                Lemma::Maximal | Lemma::Interval => {
                    for inc in families {
                        tag += 1;
                        let spec = MartingaleSpec {
                            increment: inc,
                            horizon: t,
                        };
                        let seed = sub_seed(cfg.seed, tag);
                        let (est, bounds): (Vec<McEstimate>, Vec<f64>) = if lemma == Lemma::Maximal
                        {
                            let e =
                                mc_crossing_probabilities(&spec, &cfg.deltas, cfg.trials, seed)?;
                            (e, cfg.deltas.iter().map(|&d| maximal_bound(d)).collect())
                        } else {
                            let e = mc_interval_crossing(
                                &spec,
                                (t / 2).max(1),
                                &cfg.deltas,
                                cfg.trials,
                                seed,
                            )?;
                            (e, cfg.deltas.clone())
                        };
                        for ((e, b), &d) in est.iter().zip(bounds).zip(&cfg.deltas) {
                            rows.push(SuiteRow {
                                lemma: lemma.name(),
                                family: inc.name().into(),
                                param: d,
                                horizon: t,
                                estimate: e.estimate,
                                stderr: e.stderr,
                                bound: b,
                                pass: e.respects(b),
                            });
                        }
                    }
                }
                Lemma::Binomial => {
                    let p = 0.1;
                    for (family, ps) in [
                        ("homogeneous", vec![p; t as usize]),
                        (
                            "heterogeneous",
                            (0..t)
                                .map(|i| if i % 2 == 0 { 0.05 } else { 0.15 })
                                .collect(),
                        ),
                    ] {
                        for &d in &cfg.deltas {
                            tag += 1;
                            // alpha chosen so the simplified bound equals delta
                            let alpha = (2.0 * p * (1.0 - p) * (1.0 / d).ln() / t as f64).sqrt();
                            let b = binomial_lower_tail_bound(t, p, alpha)?.kl;
                            let e = mc_binomial_lower_tail(
                                &ps,
                                alpha,
                                cfg.trials,
                                sub_seed(cfg.seed, tag),
                            )?;
                            rows.push(SuiteRow {
                                lemma: lemma.name(),
                                family: family.into(),
                                param: d,
                                horizon: t,
                                estimate: e.estimate,
                                stderr: e.stderr,
                                bound: b,
                                pass: e.respects(b),
                            });
                        }
                    }
                }
                Lemma::BinaryT2 => {
                    for p in [0.0, 0.1, 0.5] {
                        tag += 1;
                        let o = binary_t2_check(p, t, 1.0, cfg.trials, sub_seed(cfg.seed, tag))?;
                        rows.push(SuiteRow {
                            lemma: lemma.name(),
                            family: "bernoulli".into(),
                            param: p,
                            horizon: t,
                            estimate: o.estimate,
                            stderr: o.stderr,
                            bound: o.bound,
                            pass: o.pass,
                        });
                    }
                }
            }
        }
    }
    Ok(rows)
}
