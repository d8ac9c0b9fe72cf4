use super::{eta_i, gap_order, h_plus, SubLogConstants};
use crate::environment::validate_distribution;
use crate::error::{Error, Result};

fn check_eps(eps: f64) -> Result<()> {
    if (0.0..=1.0).contains(&eps) {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "epsilon must lie in [0, 1], got {eps}"
        )))
    }
}

fn check_p(gaps: &[f64], p: &[f64]) -> Result<()> {
    if p.len() != gaps.len() {
        return Err(Error::domain(format!(
            "{} sampling weights for {} arms",
            p.len(),
            gaps.len()
        )));
    }
    validate_distribution(p)
}

/// `sum_i max{0, h_i(T)/(2 D_i) - eps p_i T D_i}` over sub-optimal arms.
pub fn lb_passive_simple(
    t: f64,
    gaps: &[f64],
    eps: f64,
    p: &[f64],
    consts: &SubLogConstants,
) -> Result<f64> {
    let order = gap_order(gaps)?;
    check_eps(eps)?;
    check_p(gaps, p)?;
    if t < 3.0 {
        return Ok(0.0);
    }
    Ok(order
        .sorted
        .iter()
        .map(|&i| {
            let d = gaps[i];
            (h_plus(t, gaps, i, consts) / (2.0 * d) - eps * p[i] * t * d).max(0.0)
        })
        .sum())
}

/// Per-arm two-regime bound, `rate_i` being the arm's free-observation rate.
fn two_regime(t: f64, gaps: &[f64], i: usize, rate: f64, consts: &SubLogConstants) -> f64 {
    let d = gaps[i];
    let tau = if rate > 0.0 {
        1.0 / (2.0 * rate * d * d)
    } else {
        f64::INFINITY
    };
    let s = t.min(tau);
    if s < 3.0 {
        return 0.0;
    }
    (h_plus(s, gaps, i, consts) - 2.0 * rate * d * d * s).max(0.0) / (2.0 * d)
}

/// Sum over sub-optimal arms of `r_i / (2 D_i)` where `r_i` follows the
/// small-`T` form up to `tau_i = 1/(2 eps p_i D_i^2)` and is frozen at
/// `h_i(tau_i) - 1` afterwards.
pub fn lb_passive_theorem(
    t: f64,
    gaps: &[f64],
    eps: f64,
    p: &[f64],
    consts: &SubLogConstants,
) -> Result<f64> {
    let order = gap_order(gaps)?;
    check_eps(eps)?;
    check_p(gaps, p)?;
    Ok(order
        .sorted
        .iter()
        .map(|&i| two_regime(t, gaps, i, eps * p[i], consts))
        .sum())
}

/// Large-`T` value of `r_i` written out explicitly:
/// `ln((1/eps) / (4 C p_i A_i)) - ln ln tau_i + eta_i(tau_i) - 1`, with
/// `A_i = sum_{j != i} D_i/(D_i + D_j)`.
pub fn passive_large_t_branch(
    gaps: &[f64],
    i: usize,
    eps: f64,
    p: &[f64],
    consts: &SubLogConstants,
) -> Result<f64> {
    gap_order(gaps)?;
    let d = gaps[i];
    if !(d > 0.0 && eps > 0.0 && p[i] > 0.0) {
        return Err(Error::domain(
            "large branch needs a sub-optimal arm with eps p_i > 0",
        ));
    }
    let tau = 1.0 / (2.0 * eps * p[i] * d * d);
    let share: f64 = gaps
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, &g)| d / (d + g))
        .sum();
    Ok(
        (1.0 / eps / (4.0 * consts.c * p[i] * share)).ln() - tau.ln().ln()
            + eta_i(tau, gaps, i, d, consts)?
            - 1.0,
    )
}

/// `p_i` proportional to `1/D_i` on sub-optimal arms, 0 on the best arm.
pub fn optimal_passive_distribution(gaps: &[f64]) -> Result<Vec<f64>> {
    let order = gap_order(gaps)?;
    let z: f64 = order.sorted.iter().map(|&i| 1.0 / gaps[i]).sum();
    let mut p = vec![0.0; gaps.len()];
    for &i in &order.sorted {
        p[i] = 1.0 / gaps[i] / z;
    }
    Ok(p)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActiveSimpleValue {
    pub value: f64,
    /// Rank (2 = smallest positive gap) of the arm whose observation budget
    /// is only partly covered by free observations.
    pub k: usize,
}

/// Active-observer bound at horizon `T`: free observations are spent on the
/// largest gaps first, the remaining arms must be pulled.
pub fn lb_active_simple(
    t: f64,
    gaps: &[f64],
    eps: f64,
    consts: &SubLogConstants,
) -> Result<ActiveSimpleValue> {
    let order = gap_order(gaps)?;
    check_eps(eps)?;
    let s = &order.sorted;
    if t < 3.0 {
        return Ok(ActiveSimpleValue {
            value: 0.0,
            k: s.len() + 1,
        });
    }
    let h: Vec<f64> = s
        .iter()
        .map(|&i| h_plus(t, gaps, i, consts).max(0.0))
        .collect();
    let w: Vec<f64> = s
        .iter()
        .zip(&h)
        .map(|(&i, hv)| hv / (2.0 * gaps[i] * gaps[i]))
        .collect();
    let budget = eps * t;
    let q = (0..s.len())
        .find(|&q| w[q + 1..].iter().sum::<f64>() <= budget)
        .unwrap_or(s.len() - 1);
    let head: f64 = (0..q).map(|r| h[r] / (2.0 * gaps[s[r]])).sum();
    let left = budget - w[q + 1..].iter().sum::<f64>();
    Ok(ActiveSimpleValue {
        value: head + gaps[s[q]] * (w[q] - left).max(0.0),
        k: q + 2,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct RankTerm {
    t_k: Option<u64>,
    scale: f64,
    value: f64,
}

/// Refined active lower bound. The crossing stages `t_k` do not depend on
/// the horizon, so they are computed once.
#[derive(Debug, Clone, PartialEq)]
pub struct ActiveLowerBound {
    terms: Vec<RankTerm>,
}

impl ActiveLowerBound {
    pub fn new(gaps: &[f64], eps: f64, consts: SubLogConstants) -> Result<Self> {
        let order = gap_order(gaps)?;
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(Error::domain(format!(
                "epsilon must lie in (0, 1], got {eps}"
            )));
        }
        let s = &order.sorted;
        let m = s.len();
        let mut terms = Vec::new();
        // rank k = q + 2 for q in 0..m-1: head is s[..=q], tail is s[q+1..]
        for q in 0..m.saturating_sub(1) {
            let tail = &s[q + 1..];
            let f = |t: u64| -> f64 {
                let tf = t as f64;
                tail.iter()
                    .map(|&j| h_plus(tf, gaps, j, &consts) / (2.0 * gaps[j] * gaps[j]))
                    .sum::<f64>()
                    - eps * tf
            };
            let scale = tail
                .iter()
                .map(|&j| 1.0 / (2.0 * gaps[j] * gaps[j]))
                .sum::<f64>()
                / eps;
            let t_k = last_positive(f, scale);
            let value = match t_k {
                Some(tk) => {
                    let x = scale.min(tk as f64);
                    if x >= 3.0 {
                        s[..=q]
                            .iter()
                            .map(|&i| h_plus(x, gaps, i, &consts).max(0.0) / gaps[i])
                            .sum()
                    } else {
                        0.0
                    }
                }
                None => 0.0,
            };
            terms.push(RankTerm { t_k, scale, value });
        }
        Ok(Self { terms })
    }

    /// `t_k` for rank `k` in `2..K`; `None` when the tail never outweighs `eps t`.
    pub fn t_k(&self, k: usize) -> Option<u64> {
        self.terms.get(k.checked_sub(2)?)?.t_k
    }

    /// `(1/eps) sum_{j > k} 1/(2 D_j^2)`, a lower bound on `t_k`.
    pub fn t_k_floor(&self, k: usize) -> Option<f64> {
        Some(self.terms.get(k.checked_sub(2)?)?.scale)
    }

    pub fn at(&self, t: f64) -> f64 {
        self.terms
            .iter()
            .filter(|r| matches!(r.t_k, Some(tk) if tk as f64 <= t))
            .map(|r| r.value)
            .fold(0.0, f64::max)
    }
}

/// Largest integer `t >= 3` with `f(t) > 0`: geometric scan, then bisection
/// on the bracket around the last positive grid point.
fn last_positive(f: impl Fn(u64) -> f64, scale: f64) -> Option<u64> {
    let give_up = 1e3 * scale.max(3.0);
    let mut x = 3.0f64;
    let mut last = None;
    loop {
        let t = x as u64;
        if f(t) > 0.0 {
            last = Some(t);
        } else if last.is_some() && x > 4.0 * scale {
            break;
        } else if last.is_none() && x > give_up {
            return None;
        }
        x *= 1.01;
    }
    let mut lo = last?;
    let mut hi = (lo as f64 * 1.01) as u64 + 2;
    while f(hi) > 0.0 {
        hi *= 2;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(lo)
}

pub fn lb_active_theorem(t: f64, gaps: &[f64], eps: f64, consts: &SubLogConstants) -> Result<f64> {
    Ok(ActiveLowerBound::new(gaps, eps, *consts)?.at(t))
}

/// Weaker active bound: each arm treated as if it received every free
/// observation.
pub fn lb_active_alternative(
    t: f64,
    gaps: &[f64],
    eps: f64,
    consts: &SubLogConstants,
) -> Result<f64> {
    let order = gap_order(gaps)?;
    check_eps(eps)?;
    Ok(order
        .sorted
        .iter()
        .map(|&i| two_regime(t, gaps, i, eps, consts))
        .sum())
}

#[cfg(test)]
mod tests {
    use super::super::{h_i, HTerm};
    use super::*;

    const G4: [f64; 4] = [0.0, 0.2, 1.5, 1.8];
    const G5: [f64; 5] = [0.0, 0.2, 0.5, 1.0, 1.5];

    fn c() -> SubLogConstants {
        SubLogConstants::default()
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-9 * b.abs().max(1.0)
    }

    #[test]
    fn passive_oracle_values() {
        let u = [0.25; 4];
        let cases = [
            (1e3, 0.1, 0.0, 0.0),
            (1e4, 1e-4, 3.295352888962632, 3.3193301534497044),
            (1e5, 1e-4, 6.584454495356443, 8.205059418124417),
            (1e6, 1e-5, 11.938199076224729, 14.98469983314751),
        ];
        for (t, eps, l2, t1) in cases {
            assert!(
                close(lb_passive_simple(t, &G4, eps, &u, &c()).unwrap(), l2),
                "{t} {eps}"
            );
            assert!(
                close(lb_passive_theorem(t, &G4, eps, &u, &c()).unwrap(), t1),
                "{t} {eps}"
            );
        }
    }

    #[test]
    fn passive_limits() {
        let u = [0.25; 4];
        let zero_eps = lb_passive_simple(1e5, &G4, 0.0, &u, &c()).unwrap();
        let direct: f64 = (1..4)
            .map(|i| h_plus(1e5, &G4, i, &c()).max(0.0) / (2.0 * G4[i]))
            .sum();
        assert!(close(zero_eps, direct));
        // Far beyond 1/eps * max_j h_j / (2 p_j D_j^2) the simple bound is void.
        assert_eq!(lb_passive_simple(1e9, &G4, 0.1, &u, &c()).unwrap(), 0.0);
        assert!(lb_passive_simple(1e4, &[0.0, 0.0, 1.0], 0.1, &[0.5, 0.25, 0.25], &c()).is_err());
    }

    #[test]
    fn branches_agree_at_switch() {
        let u = [0.25; 4];
        for eps in [1e-4, 1e-5, 1e-6] {
            for i in 1..4 {
                let d = G4[i];
                let tau = 1.0 / (2.0 * eps * 0.25 * d * d);
                let small = h_i(tau, &G4, i, d, &c(), HTerm::Full).unwrap()
                    - 2.0 * eps * 0.25 * d * d * tau;
                let large = passive_large_t_branch(&G4, i, eps, &u, &c()).unwrap();
                assert!(
                    (small - large).abs() <= 1e-6 * large.abs().max(1.0),
                    "{small} {large}"
                );
            }
        }
    }

    #[test]
    fn halving_eps_adds_about_ln2_per_arm() {
        let u = [0.25; 4];
        for i in 1..4 {
            let a = passive_large_t_branch(&G4, i, 1e-5, &u, &c()).unwrap();
            let b = passive_large_t_branch(&G4, i, 0.5e-5, &u, &c()).unwrap();
            let ln2 = std::f64::consts::LN_2;
            assert!(((b - a) - ln2).abs() <= 0.15 * ln2, "arm {i}: {}", b - a);
        }
    }

    #[test]
    fn optimal_distribution() {
        let p = optimal_passive_distribution(&G4).unwrap();
        let want = [
            0.0,
            0.8035714285714286,
            0.10714285714285714,
            0.08928571428571429,
        ];
        for (a, b) in p.iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
        let p = optimal_passive_distribution(&[0.0, 0.3, 0.3, 0.3]).unwrap();
        assert!(p[1..].iter().all(|x| (x - 1.0 / 3.0).abs() < 1e-15));
        assert_eq!(
            optimal_passive_distribution(&[0.4, 0.0]).unwrap(),
            vec![1.0, 0.0]
        );
        assert!(optimal_passive_distribution(&[0.0, 0.0, 0.5]).is_err());
    }

    #[test]
    fn active_simple_oracle_values() {
        let cases = [
            (1e4, 0.1, 0.0, 2),
            (1e4, 1e-3, 0.26517394189020005, 2),
            (1e4, 1e-4, 4.0933513721517665, 4),
            (1e4, 0.0, 5.480122661856798, 5),
            (1e6, 1e-5, 15.694596448933714, 3),
        ];
        for (t, eps, v, k) in cases {
            let r = lb_active_simple(t, &G5, eps, &c()).unwrap();
            assert!(close(r.value, v), "{t} {eps}: {}", r.value);
            assert_eq!(r.k, k);
        }
        // Unsorted input gives the same value.
        let shuffled = [1.0, 0.0, 1.5, 0.2, 0.5];
        let r = lb_active_simple(1e4, &shuffled, 1e-4, &c()).unwrap();
        assert!(close(r.value, 4.0933513721517665));
    }

    #[test]
    fn active_theorem_oracle_values() {
        let b = ActiveLowerBound::new(&G5, 1e-4, c()).unwrap();
        assert_eq!(
            (b.t_k(2), b.t_k(3), b.t_k(4)),
            (Some(124371), Some(30173), Some(6753))
        );
        assert!(close(b.at(1e5), 3.689813076005032));
        let b = ActiveLowerBound::new(&G5, 1e-5, c()).unwrap();
        assert_eq!(
            (b.t_k(2), b.t_k(3), b.t_k(4)),
            (Some(1945351), Some(495079), Some(135699))
        );
        assert!(close(b.at(1e7), 18.790944368027272));
        assert_eq!(b.at(1e9), b.at(1e7));
        let b = ActiveLowerBound::new(&G4, 1e-4, c()).unwrap();
        assert_eq!((b.t_k(2), b.t_k(3)), (Some(16949), Some(5248)));
        let b = ActiveLowerBound::new(&G4, 1e-5, c()).unwrap();
        assert_eq!((b.t_k(2), b.t_k(3)), (Some(270604), Some(98963)));
        let b = ActiveLowerBound::new(&G4, 1e-6, c()).unwrap();
        assert_eq!((b.t_k(2), b.t_k(3)), (Some(3624335), Some(1372562)));
        for g in [&G4[..], &G5[..]] {
            let b = ActiveLowerBound::new(g, 1e-3, c()).unwrap();
            assert!((2..g.len()).all(|k| b.t_k(k).is_none()));
            assert_eq!(b.at(1e12), 0.0);
        }
    }

    #[test]
    fn t_k_exceeds_its_floor() {
        for g in [&G4[..], &G5[..]] {
            for eps in [1e-4, 1e-5, 1e-6] {
                let b = ActiveLowerBound::new(g, eps, c()).unwrap();
                for k in 2..g.len() {
                    if let Some(tk) = b.t_k(k) {
                        assert!(tk as f64 >= b.t_k_floor(k).unwrap(), "k={k} eps={eps}");
                    }
                }
            }
        }
    }

    #[test]
    fn alternative_is_weaker_than_passive_with_full_rate() {
        let v = lb_active_alternative(1e6, &G4, 1e-5, &c()).unwrap();
        let p1 = [0.0, 1.0, 0.0, 0.0];
        let w = lb_passive_theorem(1e6, &G4, 1e-5, &p1, &c()).unwrap();
        assert!(v <= w + 1e-12);
        assert!(v >= 0.0);
    }
}
