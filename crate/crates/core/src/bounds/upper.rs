use super::gap_order;
use crate::error::{Error, Result};

/// The two regret bounds of UCB with passive free observations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UcbPassiveBound {
    /// Coefficient of `ln T`: `sum_i 24 / D_i`.
    pub log_coeff: f64,
    /// Horizon-free bound.
    pub finite: f64,
}

impl UcbPassiveBound {
    pub fn at(&self, t: f64) -> f64 {
        (self.log_coeff * t.ln()).min(self.finite)
    }
}

/// `sum 24/D_i ln T` and
/// `sum 24/D_i [ln(50/(eps p_i)) + max{ln(1/(e D_i^2)), ln ln(20/(eps p_i))}]`.
///
/// Arms with `eps p_i = 0` make the finite bound infinite.
pub fn ub_ucb_passive(gaps: &[f64], eps: f64, p: &[f64]) -> Result<UcbPassiveBound> {
    let order = gap_order(gaps)?;
    if p.len() != gaps.len() {
        return Err(Error::domain("sampling weights do not match the arms"));
    }
    let mut log_coeff = 0.0;
    let mut finite = 0.0;
    for &i in &order.sorted {
        let d = gaps[i];
        let q = eps * p[i];
        log_coeff += 24.0 / d;
        finite += if q > 0.0 {
            24.0 / d
                * ((50.0 / q).ln()
                    + (1.0 / (std::f64::consts::E * d * d))
                        .ln()
                        .max((20.0 / q).ln().ln()))
        } else {
            f64::INFINITY
        };
    }
    Ok(UcbPassiveBound { log_coeff, finite })
}

/// `H_{i,rho} = i / D_i^2 + sum_{j > i} 1 / (D_i^{2(1-rho)} D_j^{2 rho})`
/// for the arm of rank `i` (2 = smallest positive gap).
pub fn h_i_rho(gaps: &[f64], rank: usize, rho: f64) -> Result<f64> {
    let order = gap_order(gaps)?;
    let s = &order.sorted;
    if rank < 2 || rank > s.len() + 1 {
        return Err(Error::domain(format!(
            "rank must lie in 2..={}",
            s.len() + 1
        )));
    }
    let di = gaps[s[rank - 2]];
    let tail: f64 = s[rank - 1..]
        .iter()
        .map(|&j| 1.0 / (di.powf(2.0 * (1.0 - rho)) * gaps[j].powf(2.0 * rho)))
        .sum();
    Ok(rank as f64 / (di * di) + tail)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActiveUpperBound {
    /// `C_eta sum 4/D_i max{ln(1/eps), ln sqrt(H_{i,rho})} + 51 K`.
    pub main: f64,
    /// `sum (1/D_i) (ln ln(H_{i,1}/eps))^2`, the lower-order term with unit
    /// constant. Stated for rewards in `[0, 1]`.
    pub loglog: f64,
}

pub fn ub_active(gaps: &[f64], eps: f64, rho: f64, c_eta: f64) -> Result<ActiveUpperBound> {
    let order = gap_order(gaps)?;
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::domain("epsilon must lie in (0, 1]"));
    }
    let k = gaps.len();
    let mut main = 0.0;
    let mut loglog = 0.0;
    for (r, &i) in order.sorted.iter().enumerate() {
        let rank = r + 2;
        let d = gaps[i];
        let h = h_i_rho(gaps, rank, rho)?;
        let h1 = h_i_rho(gaps, rank, 1.0)?;
        main += 4.0 / d * (1.0 / eps).ln().max(h.sqrt().ln());
        loglog += (h1 / eps).ln().ln().powi(2) / d;
    }
    Ok(ActiveUpperBound {
        main: c_eta * main + 51.0 * k as f64,
        loglog,
    })
}

/// `(1/T) K / D^2`.
pub fn epsilon_star(k: usize, delta: f64, t: f64) -> Result<f64> {
    if !(delta > 0.0 && t > 0.0) {
        return Err(Error::domain("need a positive gap and horizon"));
    }
    Ok(k as f64 / (delta * delta) / t)
}
