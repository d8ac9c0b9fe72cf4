//! Closed-form regret bounds and the special functions they need.
//!
//! All gap vectors are given with the best arm at gap 0; every other arm
//! must have a strictly positive gap. Logarithms are natural.

mod lambert;
mod lower;
mod upper;

pub use lambert::{lambert_w, lambert_w_minus1_lb};
pub use lower::{
    lb_active_alternative, lb_active_simple, lb_active_theorem, lb_passive_simple,
    lb_passive_theorem, optimal_passive_distribution, passive_large_t_branch, ActiveLowerBound,
    ActiveSimpleValue,
};
pub use upper::{
    epsilon_star, h_i_rho, ub_active, ub_ucb_passive, ActiveUpperBound, UcbPassiveBound,
};

use serde::Serialize;

use crate::error::{Error, Result};

/// Constants `(C, C0)` of the sub-logarithmic class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubLogConstants {
    pub c: f64,
    pub c0: f64,
}

impl Default for SubLogConstants {
    fn default() -> Self {
        Self {
            c: 8.0,
            c0: 1.0 + std::f64::consts::PI.powi(2) / 3.0,
        }
    }
}

impl SubLogConstants {
    pub fn new(c: f64, c0: f64) -> Result<Self> {
        if c > 0.0 && c0 > 0.0 {
            Ok(Self { c, c0 })
        } else {
            Err(Error::domain("C and C0 must be positive"))
        }
    }
}

/// How `h_i(T)` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HTerm {
    /// `ln(T D^2 / (2 C ln T sum_j D/(D+D_j)))` only.
    LogTerm,
    /// Log term plus the correction `eta_i(T)` exactly as written.
    Full,
    /// `max(0, 1 - a/T) * max(0, L) - ln 2`, where the full form is
    /// `(1 - a/T) L - ln 2` with `a = C_K + C C_D ln T`,
    /// `L = ln(T D^2 / (C_K D + C ln T sum_j D/(D+D_j)))`. Agrees with `Full`
    /// whenever both factors are non-negative and is non-decreasing in `T`.
    #[default]
    Clamped,
}

/// Sub-optimal arms sorted by increasing gap.
pub(crate) struct GapOrder {
    pub sorted: Vec<usize>,
}

pub(crate) fn gap_order(gaps: &[f64]) -> Result<GapOrder> {
    if gaps.len() < 2 {
        return Err(Error::domain("need at least two arms"));
    }
    if gaps.iter().any(|g| !(g.is_finite() && *g >= 0.0)) {
        return Err(Error::domain("gaps must be finite and non-negative"));
    }
    let best = gaps
        .iter()
        .position(|&g| g == 0.0)
        .ok_or_else(|| Error::domain("no arm has gap 0"))?;
    let mut sorted: Vec<usize> = (0..gaps.len()).filter(|&i| i != best).collect();
    if sorted.iter().any(|&i| gaps[i] == 0.0) {
        return Err(Error::domain("sub-optimal arms need a positive gap"));
    }
    sorted.sort_by(|&a, &b| gaps[a].total_cmp(&gaps[b]).then(a.cmp(&b)));
    Ok(GapOrder { sorted })
}

struct HParts {
    log_term: f64,
    a: f64,
    l: f64,
}

fn h_parts(t: f64, gaps: &[f64], i: usize, delta: f64, consts: &SubLogConstants) -> Result<HParts> {
    if !(t >= 3.0) {
        return Err(Error::domain(format!("h_i needs T >= 3, got {t}")));
    }
    if !(delta > 0.0) {
        return Err(Error::domain(format!(
            "h_i needs a positive gap, got {delta}"
        )));
    }
    if i >= gaps.len() {
        return Err(Error::IndexOutOfRange {
            index: i,
            len: gaps.len(),
        });
    }
    let ck = consts.c0 * gaps.iter().sum::<f64>();
    let cd: f64 = gaps.iter().filter(|&&g| g > 0.0).map(|g| 1.0 / g).sum();
    let share: f64 = gaps
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, &g)| delta / (delta + g))
        .sum();
    let lt = t.ln();
    Ok(HParts {
        log_term: (t * delta * delta / (2.0 * consts.c * lt * share)).ln(),
        a: ck + consts.c * cd * lt,
        l: (t * delta * delta / (ck * delta + consts.c * lt * share)).ln(),
    })
}

/// Correction term `eta_i(T)`; tends to 0 as `T` grows.
pub fn eta_i(t: f64, gaps: &[f64], i: usize, delta: f64, consts: &SubLogConstants) -> Result<f64> {
    let p = h_parts(t, gaps, i, delta, consts)?;
    Ok(p.l - std::f64::consts::LN_2 - p.a / t * p.l - p.log_term)
}

pub fn h_i(
    t: f64,
    gaps: &[f64],
    i: usize,
    delta: f64,
    consts: &SubLogConstants,
    mode: HTerm,
) -> Result<f64> {
    let p = h_parts(t, gaps, i, delta, consts)?;
    Ok(match mode {
        HTerm::LogTerm => p.log_term,
        HTerm::Full => (1.0 - p.a / t) * p.l - std::f64::consts::LN_2,
        HTerm::Clamped => (1.0 - p.a / t).max(0.0) * p.l.max(0.0) - std::f64::consts::LN_2,
    })
}

/// Clamped `h_i` at `Delta = Delta_i`, the form used by every calculator.
pub(crate) fn h_plus(t: f64, gaps: &[f64], i: usize, consts: &SubLogConstants) -> f64 {
    h_i(t, gaps, i, gaps[i], consts, HTerm::Clamped).unwrap_or(f64::NEG_INFINITY)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Lemma2,
    Theorem1,
    Lemma3,
    Theorem2,
    UbTheorem3LogT,
    UbTheorem3Finite,
    UbTheorem4,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundCurve {
    pub kind: BoundKind,
    pub stages: Vec<u64>,
    pub values: Vec<f64>,
}

/// Inputs for a full table of bounds over a stage grid.
#[derive(Debug, Clone)]
pub struct BoundInputs<'a> {
    pub gaps: &'a [f64],
    pub eps: f64,
    pub p: &'a [f64],
    pub rho: f64,
    pub c_eta: f64,
    pub consts: SubLogConstants,
}

/// One curve per [`BoundKind`] over `stages` (each `>= 3`, increasing).
pub fn bound_curves(stages: &[u64], inp: &BoundInputs<'_>) -> Result<Vec<BoundCurve>> {
    if stages.windows(2).any(|w| w[0] >= w[1]) || stages.iter().any(|&t| t < 3) {
        return Err(Error::domain("stages must be increasing and at least 3"));
    }
    let active = ActiveLowerBound::new(inp.gaps, inp.eps, inp.consts)?;
    let ub3 = ub_ucb_passive(inp.gaps, inp.eps, inp.p)?;
    let ub4 = ub_active(inp.gaps, inp.eps, inp.rho, inp.c_eta)?;
    let mut rows: Vec<[f64; 7]> = Vec::with_capacity(stages.len());
    for &t in stages {
        let tf = t as f64;
        rows.push([
            lb_passive_simple(tf, inp.gaps, inp.eps, inp.p, &inp.consts)?,
            lb_passive_theorem(tf, inp.gaps, inp.eps, inp.p, &inp.consts)?,
            lb_active_simple(tf, inp.gaps, inp.eps, &inp.consts)?.value,
            active.at(tf),
            ub3.log_coeff * tf.ln(),
            ub3.finite,
            ub4.main + ub4.loglog,
        ]);
    }
    let kinds = [
        BoundKind::Lemma2,
        BoundKind::Theorem1,
        BoundKind::Lemma3,
        BoundKind::Theorem2,
        BoundKind::UbTheorem3LogT,
        BoundKind::UbTheorem3Finite,
        BoundKind::UbTheorem4,
    ];
    Ok(kinds
        .iter()
        .enumerate()
        .map(|(c, &kind)| BoundCurve {
            kind,
            stages: stages.to_vec(),
            values: rows.iter().map(|r| r[c]).collect(),
        })
        .collect())
}
