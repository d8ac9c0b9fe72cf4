use std::fs;
use std::io::Write;
use std::path::Path;

use super::stats::AggregateStats;
use crate::bounds::{BoundCurve, BoundKind};
use crate::error::{Error, Result};
use crate::sim::RegretTrace;

pub const STATS_HEADER: &str = "t,mean,q10,q25,q75,q90";
pub const TRACE_HEADER: &str = "t,regret";
pub const BOUNDS_HEADER: &str =
    "T,lemma2,theorem1,lemma3,theorem2,ub_theorem3_logT,ub_theorem3_finite,ub_theorem4";

/// `%.10g`-style formatting: 10 significant digits, trailing zeros removed,
/// scientific notation outside `[1e-4, 1e10)`.
pub fn fmt_g10(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.9e}");
    let (mant, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..10).contains(&exp) {
        let mant = trim_zeros(mant);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mant}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (9 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn stats_csv(stats: &AggregateStats) -> String {
    let mut s = String::from(STATS_HEADER);
    s.push('\n');
    for i in 0..stats.checkpoints.len() {
        let row = [
            stats.mean[i],
            stats.q10[i],
            stats.q25[i],
            stats.q75[i],
            stats.q90[i],
        ];
        s.push_str(&stats.checkpoints[i].to_string());
        for v in row {
            s.push(',');
            s.push_str(&fmt_g10(v));
        }
        s.push('\n');
    }
    s
}

pub fn trace_csv(trace: &RegretTrace) -> String {
    let mut s = String::from(TRACE_HEADER);
    s.push('\n');
    for (t, r) in trace.checkpoints.iter().zip(&trace.regret) {
        s.push_str(&format!("{t},{}\n", fmt_g10(*r)));
    }
    s
}

/// Bounds table. `curves` must contain every [`BoundKind`] on a common grid.
pub fn bounds_csv(curves: &[BoundCurve]) -> Result<String> {
    let order = [
        BoundKind::Lemma2,
        BoundKind::Theorem1,
        BoundKind::Lemma3,
        BoundKind::Theorem2,
        BoundKind::UbTheorem3LogT,
        BoundKind::UbTheorem3Finite,
        BoundKind::UbTheorem4,
    ];
    let cols: Vec<&BoundCurve> = order
        .iter()
        .map(|k| {
            curves
                .iter()
                .find(|c| c.kind == *k)
                .ok_or_else(|| Error::domain(format!("missing curve {k:?}")))
        })
        .collect::<Result<_>>()?;
    let stages = &cols[0].stages;
    if cols
        .iter()
        .any(|c| &c.stages != stages || c.values.len() != stages.len())
    {
        return Err(Error::domain("curves do not share a stage grid"));
    }
    let mut s = String::from(BOUNDS_HEADER);
    s.push('\n');
    for (i, t) in stages.iter().enumerate() {
        s.push_str(&t.to_string());
        for c in &cols {
            s.push(',');
            s.push_str(&fmt_g10(c.values[i]));
        }
        s.push('\n');
    }
    Ok(s)
}

pub fn write_file(path: &Path, contents: &str) -> std::io::Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    let mut f = fs::File::create(path)?;
    f.write_all(contents.as_bytes())
}

pub fn emit_stats_csv(stats: &AggregateStats, path: &Path) -> std::io::Result<()> {
    write_file(path, &stats_csv(stats))
}

/// Parses a stats CSV back into its columns.
pub fn parse_stats_csv(text: &str) -> Result<AggregateStats> {
    let mut lines = text.lines();
    if lines.next() != Some(STATS_HEADER) {
        return Err(Error::domain("unexpected stats header"));
    }
    let mut s = AggregateStats {
        checkpoints: vec![],
        mean: vec![],
        q10: vec![],
        q25: vec![],
        q75: vec![],
        q90: vec![],
        replications: 0,
    };
    for (n, line) in lines.enumerate() {
        let f: Vec<&str> = line.split(',').collect();
        let bad = || Error::domain(format!("malformed row {}", n + 2));
        if f.len() != 6 {
            return Err(bad());
        }
        s.checkpoints.push(f[0].parse().map_err(|_| bad())?);
        let v: Vec<f64> = f[1..]
            .iter()
            .map(|x| x.parse::<f64>().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        s.mean.push(v[0]);
        s.q10.push(v[1]);
        s.q25.push(v[2]);
        s.q75.push(v[3]);
        s.q90.push(v[4]);
    }
    Ok(s)
}
