//! End-to-end tests that drive the compiled `lietrack` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use nalgebra::DMatrix;
use serde_json::{json, Value};
use tempfile::TempDir;

use lietrack_core::{
    fit_decay_rate, AlgebraElement, ControllerConfig, Frame, GroupElement, GroupTag, Mat,
    ReferenceTrajectory, Scenario, SimRecord, SimRow,
};

fn lietrack(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lietrack"))
        .args(args)
        .output()
        .expect("binary should spawn")
}

fn write_config(dir: &Path, value: &Value) -> PathBuf {
    let path = dir.join("config.json");
    std::fs::write(&path, serde_json::to_string_pretty(value).unwrap()).unwrap();
    path
}

fn read_summary(dir: &Path) -> Value {
    let text = std::fs::read_to_string(dir.join("summary.json")).unwrap();
    serde_json::from_str(&text).unwrap()
}

/// Run a config and return (exit code, output dir kept alive by the caller).
fn run_into(config: &Value, extra: &[&str]) -> (i32, TempDir) {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), config);
    let out = tmp.path().join("out");
    let mut args = vec!["run", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    let result = lietrack(&args);
    (result.status.code().unwrap_or(-1), tmp)
}

#[test]
fn list_names_every_built_in() {
    let out = lietrack(&["list"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["se3_helix", "su4_constant", "gl4_random_walk", "arm_helix", "custom"] {
        assert!(text.contains(name), "roster is missing {name}:\n{text}");
    }
    assert!(text.contains("k = 1"), "roster should show default parameters:\n{text}");
}

#[test]
fn se3_helix_completes_and_passes() {
    let (code, tmp) = run_into(&json!({"experiment": "se3_helix"}), &[]);
    assert_eq!(code, 0);
    let dir = tmp.path().join("out");
    for artifact in ["metrics.csv", "record.json", "summary.json"] {
        assert!(dir.join(artifact).exists(), "missing {artifact}");
    }
    let summary = read_summary(&dir);
    assert_eq!(summary["passed"], json!(true));
    let rate = summary["decay_rate"].as_f64().unwrap();
    assert!((-1.05..=-0.95).contains(&rate), "decay rate {rate} is off target");
    assert!(summary["r_squared"].as_f64().unwrap() >= 0.999);
    assert!(summary["runtime_seconds"].as_f64().unwrap() < 5.0);
    assert_eq!(summary["rows"], json!(1001));
}

#[test]
fn unitary_and_volume_built_ins_pass() {
    for name in ["su4_constant", "gl4_random_walk"] {
        let (code, tmp) = run_into(&json!({ "experiment": name }), &[]);
        assert_eq!(code, 0, "{name} should pass with defaults");
        let summary = read_summary(&tmp.path().join("out"));
        let rate = summary["decay_rate"].as_f64().unwrap();
        assert!((-1.05..=-0.95).contains(&rate), "{name} decay rate {rate} is off target");
    }
}

#[test]
fn arm_run_reports_joint_columns() {
    let (code, tmp) = run_into(&json!({"experiment": "arm_helix"}), &[]);
    assert_eq!(code, 0);
    let dir = tmp.path().join("out");
    let csv = std::fs::read_to_string(dir.join("metrics.csv")).unwrap();
    let header = csv.lines().next().unwrap();
    assert!(header.contains(",x,y,z"), "tool position columns missing: {header}");
    for j in 0..7 {
        assert!(header.contains(&format!("theta{j}")), "joint column theta{j} missing");
    }
    let summary = read_summary(&dir);
    assert!(summary["final_err_log_norm"].as_f64().unwrap() < 1e-3);
}

#[test]
fn identical_runs_are_byte_identical() {
    let config = json!({"experiment": "gl4_random_walk", "duration": 3.0,
        "expect": {"rate": -1.0, "rate_tol": 0.1, "r2_min": 0.99, "window": [0.0, 3.0], "final_err_max": 1.0}});
    let (code_a, tmp_a) = run_into(&config, &[]);
    let (code_b, tmp_b) = run_into(&config, &[]);
    assert_eq!(code_a, 0);
    assert_eq!(code_b, 0);
    for artifact in ["metrics.csv", "record.json"] {
        let a = std::fs::read(tmp_a.path().join("out").join(artifact)).unwrap();
        let b = std::fs::read(tmp_b.path().join("out").join(artifact)).unwrap();
        assert_eq!(a, b, "{artifact} differs between identical runs");
    }
}

/// The reported decay rate must be reproducible from the emitted CSV alone:
/// reparsing the shortest-roundtrip decimals and refitting gives the same
/// bits the summary carries.
#[test]
fn summary_rate_refits_bitwise_from_the_csv() {
    let (code, tmp) = run_into(&json!({"experiment": "se3_helix"}), &[]);
    assert_eq!(code, 0);
    let dir = tmp.path().join("out");
    let summary = read_summary(&dir);
    let window = (
        summary["fit_window"][0].as_f64().unwrap(),
        summary["fit_window"][1].as_f64().unwrap(),
    );

    let tag = GroupTag::so(3);
    let placeholder_state =
        GroupElement::identity(tag, (Frame::new("S"), Frame::new("D")));
    let placeholder_control = AlgebraElement::zero(tag, Frame::new("D"));
    let csv = std::fs::read_to_string(dir.join("metrics.csv")).unwrap();
    let rows: Vec<SimRow> = csv
        .lines()
        .skip(1)
        .map(|line| {
            let cells: Vec<f64> =
                line.split(',').map(|c| c.parse().unwrap()).collect();
            SimRow {
                t: cells[0],
                state: placeholder_state.clone(),
                control: placeholder_control.clone(),
                err_frobenius: cells[1],
                err_log_norm: cells[2],
                err_spectral: cells[3],
                joint_angles: None,
                tool_position: None,
            }
        })
        .collect();
    let record = SimRecord { rows };
    let (rate, r_squared) = fit_decay_rate(&record, window).unwrap();
    assert_eq!(rate, summary["decay_rate"].as_f64().unwrap());
    assert_eq!(r_squared, summary["r_squared"].as_f64().unwrap());
}

#[test]
fn seed_sweep_fills_one_directory_per_seed() {
    let config = json!({"experiment": "se3_helix", "seeds": [1, 2, 3], "duration": 2.0,
        "expect": {"rate": -1.0, "rate_tol": 0.05, "r2_min": 0.999, "window": [0.0, 2.0], "final_err_max": 1.0}});
    let (code, tmp) = run_into(&config, &["--jobs", "2"]);
    assert_eq!(code, 0);
    let out = tmp.path().join("out");
    for seed in [1u64, 2, 3] {
        let dir = out.join(format!("seed_{seed}"));
        let summary = read_summary(&dir);
        assert_eq!(summary["seed"].as_u64().unwrap(), seed);
        assert_eq!(summary["passed"], json!(true));
        assert!(dir.join("metrics.csv").exists());
    }
    // Sweeps are deterministic regardless of thread interleaving.
    let (code_again, tmp_again) = run_into(&config, &["--jobs", "3"]);
    assert_eq!(code_again, 0);
    let a = std::fs::read(out.join("seed_3/metrics.csv")).unwrap();
    let b = std::fs::read(tmp_again.path().join("out/seed_3/metrics.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn flag_overrides_beat_config_values() {
    let config = json!({"experiment": "se3_helix", "k": 0.5, "duration": 5.0, "seed": 3,
        "expect": {"rate": -2.0, "rate_tol": 0.1, "r2_min": 0.999, "window": [0.0, 3.0], "final_err_max": 1e-3}});
    let (code, tmp) = run_into(&config, &["--k", "2.0", "--dt", "0.005", "--seed", "9"]);
    assert_eq!(code, 0);
    let summary = read_summary(&tmp.path().join("out"));
    assert_eq!(summary["k"].as_f64().unwrap(), 2.0);
    assert_eq!(summary["dt"].as_f64().unwrap(), 0.005);
    assert_eq!(summary["seed"].as_u64().unwrap(), 9);
    let rate = summary["decay_rate"].as_f64().unwrap();
    assert!((-2.1..=-1.9).contains(&rate), "doubled gain should double the rate, got {rate}");
}

#[test]
fn custom_scenario_runs_with_its_own_parameters() {
    let tag = GroupTag::so(3);
    let s = Frame::new("S");
    let d = Frame::new("D");
    let g0 = GroupElement::identity(tag, (s, d.clone()));
    let vb = lietrack_core::hat(
        &tag,
        &lietrack_core::Twist::rotation(nalgebra::Vector3::new(0.2, 0.1, 0.3)),
        d,
    )
    .unwrap();
    let offset = lietrack_core::make_offset_initial_state(&tag, 42, 0.5).unwrap();
    let start = lietrack_core::initial_state_with_offset(&g0, &offset).unwrap();
    let scenario = Scenario {
        tag,
        reference: ReferenceTrajectory::constant_twist(g0, vb).unwrap(),
        initial_state: start,
        cfg: ControllerConfig { k: 2.0, dt: 0.01, branch: Default::default() },
        duration: 4.0,
        seed: 7,
        reproject_every: 100,
    };
    let config = json!({"experiment": "custom", "scenario": serde_json::to_value(&scenario).unwrap()});
    let (code, tmp) = run_into(&config, &[]);
    assert_eq!(code, 0);
    let summary = read_summary(&tmp.path().join("out"));
    assert_eq!(summary["group"], json!("SO(3)"));
    assert_eq!(summary["k"].as_f64().unwrap(), 2.0);
    assert_eq!(summary["seed"].as_u64().unwrap(), 7);
    assert_eq!(summary["rows"], json!(401));
    // No expectations declared, so the run passes by completing.
    assert_eq!(summary["passed"], json!(true));
    assert!(summary["checks"].as_array().unwrap().is_empty());
}

/// A start whose error has eigenvalues on the negative real axis has no
/// principal logarithm; the run must abort at step 0 and say so.
#[test]
fn aborting_run_reports_the_failing_step() {
    let tag = GroupTag::gl0(4);
    let s = Frame::new("S");
    let d = Frame::new("D");
    let g0 = GroupElement::identity(tag, (s.clone(), d.clone()));
    let vb = AlgebraElement::zero(tag, d);
    let flipped = DMatrix::from_diagonal(&nalgebra::dvector![-1.0, -1.0, 1.0, 1.0]);
    let start =
        GroupElement::new(tag, (s, Frame::new("T")), Mat::Real(flipped)).unwrap();
    let scenario = Scenario {
        tag,
        reference: ReferenceTrajectory::constant_twist(g0, vb).unwrap(),
        initial_state: start,
        cfg: ControllerConfig { k: 1.0, dt: 0.01, branch: Default::default() },
        duration: 1.0,
        seed: 0,
        reproject_every: 100,
    };
    let config = json!({"experiment": "custom", "scenario": serde_json::to_value(&scenario).unwrap()});
    let (code, tmp) = run_into(&config, &[]);
    assert_eq!(code, 1);
    let dir = tmp.path().join("out");
    let summary = read_summary(&dir);
    assert_eq!(summary["passed"], json!(false));
    assert_eq!(summary["failed_step"], json!(0));
    assert!(summary["error"].as_str().unwrap().contains("logarithm"));
    // An aborted run has no time series to write.
    assert!(!dir.join("metrics.csv").exists());
}

#[test]
fn failed_expectations_exit_one_but_write_artifacts() {
    // Two seconds is not long enough to reach the default error ceiling.
    let (code, tmp) = run_into(&json!({"experiment": "se3_helix", "duration": 2.0}), &[]);
    assert_eq!(code, 1);
    let dir = tmp.path().join("out");
    assert!(dir.join("metrics.csv").exists());
    let summary = read_summary(&dir);
    assert_eq!(summary["passed"], json!(false));
    assert_eq!(summary["failed_step"], Value::Null);
    let failed: Vec<&str> = summary["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["passed"] == json!(false))
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert_eq!(failed, vec!["final_error"]);
}

#[test]
fn zero_duration_is_rejected_before_running() {
    let (code, _tmp) = run_into(&json!({"experiment": "se3_helix", "duration": 0.0}), &[]);
    assert_eq!(code, 2);
}

#[test]
fn malformed_configs_are_usage_errors() {
    let tmp = TempDir::new().unwrap();
    let bad = tmp.path().join("bad.json");
    std::fs::write(&bad, "not json").unwrap();
    let out = lietrack(&["run", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    let missing = tmp.path().join("missing.json");
    let out = lietrack(&["run", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    let (code, _tmp) = run_into(&json!({"experiment": "se3_helix", "bogus": 1}), &[]);
    assert_eq!(code, 2, "unknown config keys must be rejected");

    let (code, _tmp) = run_into(&json!({"experiment": "custom"}), &[]);
    assert_eq!(code, 2, "custom without a scenario must be rejected");

    let (code, _tmp) = run_into(
        &json!({"experiment": "se3_helix", "scenario": {"anything": 1}}),
        &[],
    );
    assert_eq!(code, 2, "scenario objects only belong to custom runs");

    let (code, _tmp) =
        run_into(&json!({"experiment": "se3_helix", "k": 250.0}), &[]);
    assert_eq!(code, 2, "k·dt beyond the stability bound must be rejected");
}
