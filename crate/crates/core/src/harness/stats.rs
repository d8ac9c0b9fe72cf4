use crate::error::{Error, Result};
use crate::sim::RegretTrace;

/// Nearest-rank quantile of an ascending slice: the value at rank
/// `ceil(q n)` (1-based, at least 1).
pub fn quantile_nearest_rank(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of an empty sample");
    let n = sorted.len();
    let rank = ((q * n as f64).ceil() as usize).clamp(1, n);
    sorted[rank - 1]
}

/// Mean and quantile curves over replications.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateStats {
    pub checkpoints: Vec<u64>,
    pub mean: Vec<f64>,
    pub q10: Vec<f64>,
    pub q25: Vec<f64>,
    pub q75: Vec<f64>,
    pub q90: Vec<f64>,
    pub replications: usize,
}

impl AggregateStats {
    pub fn from_traces(traces: &[RegretTrace]) -> Result<Self> {
        let first = traces
            .first()
            .ok_or_else(|| Error::domain("no traces to aggregate"))?;
        if traces.iter().any(|t| t.checkpoints != first.checkpoints) {
            return Err(Error::domain("traces use different checkpoints"));
        }
        let m = first.checkpoints.len();
        let n = traces.len();
        let mut out = Self {
            checkpoints: first.checkpoints.clone(),
            mean: Vec::with_capacity(m),
            q10: Vec::with_capacity(m),
            q25: Vec::with_capacity(m),
            q75: Vec::with_capacity(m),
            q90: Vec::with_capacity(m),
            replications: n,
        };
        let mut col = Vec::with_capacity(n);
        for c in 0..m {
            col.clear();
            col.extend(traces.iter().map(|t| t.regret[c]));
            // summed in replication order so the mean is reproducible
            out.mean.push(col.iter().sum::<f64>() / n as f64);
            col.sort_by(f64::total_cmp);
            out.q10.push(quantile_nearest_rank(&col, 0.10));
            out.q25.push(quantile_nearest_rank(&col, 0.25));
            out.q75.push(quantile_nearest_rank(&col, 0.75));
            out.q90.push(quantile_nearest_rank(&col, 0.90));
        }
        Ok(out)
    }

    pub fn final_mean(&self) -> f64 {
        self.mean.last().copied().unwrap_or(0.0)
    }

    /// Mean at checkpoint `t`, if present.
    pub fn mean_at(&self, t: u64) -> Option<f64> {
        self.checkpoints
            .iter()
            .position(|&c| c == t)
            .map(|i| self.mean[i])
    }
}
