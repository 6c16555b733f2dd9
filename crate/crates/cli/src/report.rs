//! Run summaries, pass/fail checks, and artifact output.

use std::path::Path;

use serde::Serialize;

use lietrack_core::{fit_decay_rate, LieError, SimRecord};

use crate::experiments::ExpectSpec;

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Contents of `summary.json`.
#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub experiment: String,
    pub group: String,
    pub k: f64,
    pub dt: f64,
    pub duration: f64,
    pub seed: u64,
    pub rows: usize,
    pub fit_window: Option<(f64, f64)>,
    pub decay_rate: Option<f64>,
    pub r_squared: Option<f64>,
    pub final_err_frobenius: Option<f64>,
    pub final_err_log_norm: Option<f64>,
    pub final_err_spectral: Option<f64>,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
    pub failed_step: Option<usize>,
    pub error: Option<String>,
    pub runtime_seconds: f64,
}

/// Judge a completed record against the declared tolerances and fill in
/// the summary. The decay fit runs on the log-error norm — the same
/// series a reader of `metrics.csv` would fit.
pub fn summarize_success(
    mut summary: Summary,
    record: &SimRecord,
    expect: Option<&ExpectSpec>,
) -> Summary {
    let last = record.final_row();
    summary.rows = record.len();
    summary.final_err_frobenius = Some(last.err_frobenius);
    summary.final_err_log_norm = Some(last.err_log_norm);
    summary.final_err_spectral = Some(last.err_spectral);

    let window = expect.map(|e| e.window).unwrap_or((0.0, summary.duration));
    summary.fit_window = Some(window);
    match fit_decay_rate(record, window) {
        Ok((rate, r2)) => {
            summary.decay_rate = Some(rate);
            summary.r_squared = Some(r2);
        }
        Err(e) => {
            summary.checks.push(CheckResult {
                name: "decay_fit".into(),
                passed: expect.is_none(),
                detail: format!("no usable decay signal: {e}"),
            });
        }
    }

    if let Some(e) = expect {
        if let (Some(rate), Some(r2)) = (summary.decay_rate, summary.r_squared) {
            summary.checks.push(CheckResult {
                name: "decay_rate".into(),
                passed: (rate - e.rate).abs() <= e.rate_tol,
                detail: format!("fitted {rate:.6}, target {} ± {}", e.rate, e.rate_tol),
            });
            summary.checks.push(CheckResult {
                name: "fit_quality".into(),
                passed: r2 >= e.r2_min,
                detail: format!("r² = {r2:.6}, floor {}", e.r2_min),
            });
        }
        summary.checks.push(CheckResult {
            name: "final_error".into(),
            passed: last.err_log_norm <= e.final_err_max,
            detail: format!("final log-error {:.3e}, ceiling {:.3e}", last.err_log_norm, e.final_err_max),
        });
    }

    summary.passed = summary.checks.iter().all(|c| c.passed);
    summary
}

pub fn summarize_failure(mut summary: Summary, err: &LieError) -> Summary {
    if let LieError::AtStep { step, .. } = err {
        summary.failed_step = Some(*step);
    }
    summary.error = Some(err.root_cause().to_string());
    summary.passed = false;
    summary
}

pub fn blank_summary(experiment: &str, group: &str, k: f64, dt: f64, duration: f64, seed: u64) -> Summary {
    Summary {
        experiment: experiment.to_string(),
        group: group.to_string(),
        k,
        dt,
        duration,
        seed,
        rows: 0,
        fit_window: None,
        decay_rate: None,
        r_squared: None,
        final_err_frobenius: None,
        final_err_log_norm: None,
        final_err_spectral: None,
        checks: Vec::new(),
        passed: false,
        failed_step: None,
        error: None,
        runtime_seconds: 0.0,
    }
}

/// Write `metrics.csv`, `record.json`, and `summary.json` under `dir`.
pub fn write_artifacts(
    dir: &Path,
    record: Option<&SimRecord>,
    summary: &Summary,
) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    if let Some(record) = record {
        std::fs::write(dir.join("metrics.csv"), record.to_csv())?;
        std::fs::write(dir.join("record.json"), record.to_json())?;
    }
    let text = serde_json::to_string_pretty(summary).expect("summary serialization cannot fail");
    std::fs::write(dir.join("summary.json"), text)
}
