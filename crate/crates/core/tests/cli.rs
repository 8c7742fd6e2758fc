//! Command-line behaviour: exit codes, staged runs and staged failures.

mod common;

use std::path::Path;
use std::process::{Command, Output};

use seasonload::pipeline::{self, RunConfig};
use seasonload::synthetic::{self, CohortSpec};

fn seasonload(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_seasonload"))
        .args(args)
        .env_remove("SEASONLOAD_THREADS")
        .env_remove("RUST_LOG")
        .output()
        .unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn small_cohort(dir: &Path) {
    let out = seasonload(&[
        "synth", "--income-shift", "--consumers", "30", "--years", "1", "--seed", "4", "--out", s(dir),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&seasonload(&[])), 1);
    assert_eq!(code(&seasonload(&["cluster", "--no-such-flag"])), 1);
    assert_eq!(code(&seasonload(&["cluster", "--k-range", "two"])), 1);
    assert_eq!(code(&seasonload(&["cluster", "--k-range", "5..3", "--out", "unused"])), 1);
    assert_eq!(code(&seasonload(&["classify", "--threshold-mode", "median"])), 1);
    // no load CSV configured
    assert_eq!(code(&seasonload(&["run", "--out", "unused"])), 1);
    let out = Command::new(env!("CARGO_BIN_EXE_seasonload"))
        .args(["ingest", "--load", "x.csv"])
        .env("SEASONLOAD_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&out), 1);
}

#[test]
fn help_and_version_exit_zero() {
    let out = seasonload(&["--help"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("synth"));
    assert_eq!(code(&seasonload(&["--version"])), 0);
}

#[test]
fn bad_config_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"clustering": {"k_min": 1}}"#).unwrap();
    let out = seasonload(&["run", "--config", s(&cfg), "--load", "x.csv"]);
    assert_eq!(code(&out), 1);
    std::fs::write(&cfg, r#"{"no_such_key": true}"#).unwrap();
    assert_eq!(code(&seasonload(&["run", "--config", s(&cfg)])), 1);
}

#[test]
fn unreadable_input_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = seasonload(&["run", "--load", s(&dir.path().join("missing.csv")), "--out", s(dir.path())]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("ingest"));
    // a later stage without its inputs
    let out = seasonload(&["entropy", "--out", s(&dir.path().join("empty"))]);
    assert_eq!(code(&out), 2);
}

#[test]
fn missing_socio_file_aborts_at_classify() {
    let dir = tempfile::tempdir().unwrap();
    let cohort = dir.path().join("cohort");
    small_cohort(&cohort);
    let out_dir = dir.path().join("out");
    let out = seasonload(&[
        "run",
        "--load",
        s(&cohort.join(synthetic::LOAD_FILE)),
        "--socio",
        s(&dir.path().join("nope.csv")),
        "--out",
        s(&out_dir),
    ]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("classify"));
    for name in [pipeline::DAYS, pipeline::CLUSTER_MODEL, pipeline::DAY_ASSIGNMENTS, pipeline::ENTROPY] {
        assert!(out_dir.join(name).exists(), "{name} missing");
    }
    assert!(!out_dir.join(pipeline::LABELS).exists());
    assert!(!out_dir.join(pipeline::RUN_REPORT).exists());
}

#[test]
fn stage_by_stage_matches_run() {
    let dir = tempfile::tempdir().unwrap();
    let cohort = dir.path().join("cohort");
    small_cohort(&cohort);
    let cfg = RunConfig {
        load_csv: Some(cohort.join(synthetic::LOAD_FILE)),
        socio_csv: Some(cohort.join(synthetic::SOCIO_FILE)),
        ..RunConfig::default()
    };
    let cfg_path = dir.path().join("cfg.json");
    std::fs::write(&cfg_path, serde_json::to_string(&cfg).unwrap()).unwrap();

    let whole = dir.path().join("whole");
    assert_eq!(code(&seasonload(&["run", "--config", s(&cfg_path), "--out", s(&whole)])), 0);
    let staged = dir.path().join("staged");
    for stage in ["ingest", "preprocess", "cluster", "entropy", "classify", "report"] {
        let out = seasonload(&[stage, "--config", s(&cfg_path), "--out", s(&staged)]);
        assert_eq!(code(&out), 0, "{stage}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let diffs = common::diff_names(&common::snapshot(&whole), &common::snapshot(&staged));
    assert!(diffs.is_empty(), "{diffs:?}");
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let cohort = dir.path().join("cohort");
    small_cohort(&cohort);
    let out_dir = dir.path().join("out");
    let out = seasonload(&[
        "run",
        "--load",
        s(&cohort.join(synthetic::LOAD_FILE)),
        "--socio",
        s(&cohort.join(synthetic::SOCIO_FILE)),
        "--out",
        s(&out_dir),
        "--k-range",
        "2..3",
        "--max-splits",
        "2",
        "--threshold-mode",
        "absolute",
        "--threshold-param",
        "0.1",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report: pipeline::RunReport = seasonload::io::read_json(&out_dir.join(pipeline::RUN_REPORT)).unwrap();
    assert!(report.k <= 3);
    assert_eq!(report.threshold, 0.1);
    for change in seasonload::ingestion::SeasonChange::ALL {
        let text = std::fs::read_to_string(out_dir.join(pipeline::tree_file(change))).unwrap();
        let tree: seasonload::classification::DecisionTree = serde_json::from_str(&text).unwrap();
        assert!(tree.split_count <= 2);
    }
}

#[test]
fn synth_spec_file_matches_preset() {
    let dir = tempfile::tempdir().unwrap();
    let spec = CohortSpec::planted(3, 5, 1, 9).unwrap();
    let spec_path = dir.path().join("spec.json");
    std::fs::write(&spec_path, serde_json::to_string(&spec).unwrap()).unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(code(&seasonload(&["synth", "--spec", s(&spec_path), "--out", s(&a)])), 0);
    let out = seasonload(&[
        "synth", "--planted", "3", "--consumers", "5", "--years", "1", "--seed", "9", "--out", s(&b),
    ]);
    assert_eq!(code(&out), 0);
    let snap = common::snapshot(&a);
    assert_eq!(snap.len(), 3);
    assert!(common::diff_names(&snap, &common::snapshot(&b)).is_empty());
}

#[test]
fn invalid_synth_spec_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = seasonload(&["synth", "--planted", "9", "--out", s(dir.path())]);
    assert_eq!(code(&out), 1);
}
