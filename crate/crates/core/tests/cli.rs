use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use freeobs::bounds::{bound_curves, BoundInputs, SubLogConstants};
use freeobs::harness::config::{passive_weights, PassiveDistribution};
use freeobs::harness::output::{bounds_csv, parse_stats_csv, BOUNDS_HEADER, STATS_HEADER};
use freeobs::harness::parse_config;

const FIG3: &str = r#"{
  "schema_version": 1,
  "name": "fig3",
  "arms": [
    {"kind": "gaussian", "mean": 2.0},
    {"kind": "gaussian", "mean": 1.8},
    {"kind": "gaussian", "mean": 0.5},
    {"kind": "gaussian", "mean": 0.2}
  ],
  "schedule": {"kind": "static_random", "epsilon": 0.1},
  "observer": {"kind": "passive", "distribution": "uniform"},
  "policy": {"name": "ucb_passive"},
  "horizon": 2000,
  "replications": 40,
  "seed": 11,
  "variants": [
    {"name": "uniform"},
    {"name": "optimal", "observer": {"kind": "passive", "distribution": "optimal"}},
    {"name": "suboptimal", "observer": {"kind": "passive", "distribution": "inverse_square_gap"}}
  ]
}"#;

fn freeobs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_freeobs"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(freeobs(&["--help"]).status.code(), Some(0));
    assert_eq!(freeobs(&["--version"]).status.code(), Some(0));
    assert_eq!(freeobs(&["run", "--help"]).status.code(), Some(0));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(freeobs(&[]).status.code(), Some(1));
    assert_eq!(freeobs(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(freeobs(&["run", "--jobs", "many"]).status.code(), Some(1));
}

#[test]
fn missing_config_exits_one() {
    let o = freeobs(&["run"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("--config"), "{}", stderr(&o));

    let o = freeobs(&["run", "--config", "/definitely/not/here.json"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("/definitely/not/here.json"));
}

#[test]
fn config_errors_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let typo = FIG3.replace("\"epsilon\": 0.1", "\"eps\": 0.1");
    let p = write_config(dir.path(), "typo.json", &typo);
    let o = freeobs(&["run", "--config", &p, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("schedule.eps"), "{}", stderr(&o));

    let bad = FIG3.replace(
        "\"distribution\": \"optimal\"",
        "\"p\": [0.5, 0.6, 0.0, 0.0]",
    );
    let p = write_config(dir.path(), "bad.json", &bad);
    let o = freeobs(&["run", "--config", &p, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(
        stderr(&o).contains("variants[1].observer"),
        "{}",
        stderr(&o)
    );

    let one_arm = r#"{"schema_version": 1, "name": "x", "arms": [{"kind": "gaussian", "mean": 0}],
        "observer": {"kind": "active"}, "policy": {"name": "ftl_robin"}, "horizon": 10, "replications": 1}"#;
    let p = write_config(dir.path(), "k1.json", one_arm);
    let o = freeobs(&["run", "--config", &p, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("arms"), "{}", stderr(&o));

    let mismatch = FIG3.replace(
        "{\"name\": \"uniform\"}",
        "{\"name\": \"uniform\", \"observer\": {\"kind\": \"active\"}}",
    );
    let p = write_config(dir.path(), "active_ucb.json", &mismatch);
    let o = freeobs(&["run", "--config", &p, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn run_writes_one_csv_per_variant() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_config(dir.path(), "fig3.json", FIG3);
    let out = dir.path().join("out");
    let o = freeobs(&[
        "run",
        "--config",
        &p,
        "--out",
        out.to_str().unwrap(),
        "--jobs",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert_eq!(stdout.lines().count(), 3);
    for v in ["uniform", "optimal", "suboptimal"] {
        let text = fs::read_to_string(out.join(format!("{v}.csv"))).unwrap();
        assert_eq!(text.lines().next(), Some(STATS_HEADER));
        let s = parse_stats_csv(&text).unwrap();
        assert_eq!(*s.checkpoints.last().unwrap(), 2000);
        for i in 0..s.checkpoints.len() {
            assert!(s.q10[i] <= s.q25[i] && s.q25[i] <= s.q75[i] && s.q75[i] <= s.q90[i]);
        }
        assert!(s.mean.windows(2).all(|w| w[0] <= w[1]));
    }
}

#[test]
fn seed_flag_changes_output_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_config(dir.path(), "fig3.json", FIG3);
    let read = |seed: &str, sub: &str| {
        let out = dir.path().join(sub);
        let o = freeobs(&[
            "run",
            "--config",
            &p,
            "--seed",
            seed,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
        fs::read(out.join("uniform.csv")).unwrap()
    };
    let a = read("5", "a");
    let b = read("5", "b");
    let c = read("6", "c");
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn bounds_output_matches_calculator() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = FIG3.replace("\"horizon\": 2000", "\"horizon\": 100000");
    let p = write_config(dir.path(), "fig3.json", &cfg);
    let out = dir.path().join("bounds.csv");
    let o = freeobs(&[
        "bounds",
        "--config",
        &p,
        "--variant",
        "optimal",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(BOUNDS_HEADER));
    for line in lines {
        for field in line.split(',') {
            let v: f64 = field.parse().unwrap();
            assert!(v.is_finite(), "{line}");
        }
    }

    let e = parse_config(&cfg)
        .unwrap()
        .resolve()
        .unwrap()
        .into_iter()
        .find(|e| e.name == "optimal")
        .unwrap();
    let stages: Vec<u64> = e.checkpoints.iter().copied().filter(|&t| t >= 3).collect();
    let pstar = passive_weights(PassiveDistribution::Optimal, &e.instance).unwrap();
    let curves = bound_curves(
        &stages,
        &BoundInputs {
            gaps: e.instance.gaps(),
            eps: 0.1,
            p: &pstar,
            rho: 0.5,
            c_eta: 1.0,
            consts: SubLogConstants::default(),
        },
    )
    .unwrap();
    assert_eq!(text, bounds_csv(&curves).unwrap());
}

#[test]
fn bounds_need_free_observations() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = FIG3.replace(
        "{\"kind\": \"static_random\", \"epsilon\": 0.1}",
        "{\"kind\": \"none\"}",
    );
    let p = write_config(dir.path(), "none.json", &cfg);
    assert_eq!(freeobs(&["bounds", "--config", &p]).status.code(), Some(1));
    assert_eq!(
        freeobs(&["bounds", "--config", &p, "--variant", "nope"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn sweep_prints_one_row_per_rate() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_config(dir.path(), "fig3.json", FIG3);
    let o = freeobs(&["sweep-epsilon", "--config", &p, "--eps", "1,0.1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "variant,epsilon,mean,q10,q25,q75,q90");
    assert_eq!(lines.len(), 1 + 3 * 2);
    assert!(lines[1].starts_with("uniform,1,"));
    assert!(lines[2].starts_with("uniform,0.1,"));

    assert_eq!(
        freeobs(&["sweep-epsilon", "--config", &p, "--eps", "0"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        freeobs(&["sweep-epsilon", "--config", &p, "--eps", "1.5"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn conc_check_passes_and_reports() {
    let o = freeobs(&[
        "conc-check",
        "--lemma",
        "maximal,binomial",
        "--delta",
        "0.1",
        "--horizon",
        "100",
        "--trials",
        "20000",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("lemma,family,param,horizon,estimate,stderr,bound,pass\n"));
    assert!(text.lines().skip(1).all(|l| l.ends_with(",true")));
}

#[test]
fn oracle_check_defaults_pass() {
    let o = freeobs(&["oracle-check", "--horizon", "4", "--trials", "200000"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn oracle_check_rejects_continuous_arms() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = FIG3.replace("static_random", "deterministic");
    let p = write_config(dir.path(), "fig3.json", &cfg);
    let o = freeobs(&[
        "oracle-check",
        "--config",
        &p,
        "--horizon",
        "3",
        "--trials",
        "10",
    ]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
}

#[test]
fn oracle_check_fails_on_too_few_trials_with_code_two() {
    // Forcing a disagreement: one trial cannot estimate a non-degenerate
    // expectation, and its sample variance is zero.
    let o = freeobs(&[
        "oracle-check",
        "--horizon",
        "5",
        "--trials",
        "1",
        "--seed",
        "3",
    ]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}
