//! `lietrack` — scenario runner for the tracking-control library.
//!
//! `lietrack run <config.json>` executes one experiment (or a seed sweep)
//! and writes `metrics.csv`, `record.json`, and `summary.json` per run.
//! `lietrack list` prints the built-in experiment roster.
//!
//! Exit codes: 0 — run completed and all declared checks passed;
//! 1 — runtime failure (numerical abort or failed checks), with the step
//! index recorded in `summary.json` when one exists; 2 — usage error
//! (bad flags, unreadable or schema-invalid config).

mod experiments;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Mutex;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::Deserialize;

use lietrack_core::{run_tracking, Scenario, SimRecord};

use experiments::{
    default_params, run_arm_helix, run_simulator_builtin, ExpectSpec, ExperimentKind, RunParams,
};
use report::{blank_summary, summarize_failure, summarize_success, write_artifacts, Summary};

#[derive(Parser)]
#[command(name = "lietrack", version, about = "Tracking-control experiments on matrix Lie groups")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Execute the experiment described by a JSON config file.
    Run {
        /// Path to the run configuration (JSON).
        config: PathBuf,
        /// Output directory (overrides the config's `out`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Master seed (overrides the config).
        #[arg(long)]
        seed: Option<u64>,
        /// Controller gain (overrides the config).
        #[arg(long)]
        k: Option<f64>,
        /// Time step (overrides the config).
        #[arg(long)]
        dt: Option<f64>,
        /// Worker threads for seed sweeps.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Print the built-in experiments and their default parameters.
    List,
}

/// The config file schema. Unknown keys are rejected.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunConfig {
    experiment: ExperimentKind,
    #[serde(default)]
    k: Option<f64>,
    #[serde(default)]
    dt: Option<f64>,
    #[serde(default)]
    duration: Option<f64>,
    #[serde(default)]
    seed: Option<u64>,
    /// Seed sweep; when present, one run per seed in `<out>/seed_<n>/`.
    #[serde(default)]
    seeds: Option<Vec<u64>>,
    #[serde(default)]
    min_spectral_radius: Option<f64>,
    #[serde(default)]
    damping: Option<f64>,
    #[serde(default)]
    out: Option<PathBuf>,
    /// Full scenario object; required for `custom`, ignored otherwise.
    #[serde(default)]
    scenario: Option<Scenario>,
    /// Pass/fail tolerances; built-ins carry defaults, `custom` has none.
    #[serde(default)]
    expect: Option<ExpectSpec>,
}

enum CliError {
    Usage(String),
    Runtime(String),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.cmd {
        Cmd::List => {
            print_roster();
            Ok(())
        }
        Cmd::Run { config, out, seed, k, dt, jobs } => run_command(&config, out, seed, k, dt, jobs),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn print_roster() {
    println!("built-in experiments:");
    for kind in ExperimentKind::BUILT_INS {
        let p = default_params(kind);
        println!("  {:<16} {}", kind.name(), kind.description());
        println!(
            "  {:<16} defaults: k = {}, dt = {}, duration = {}, seed = {}",
            "", p.k, p.dt, p.duration, p.seed
        );
    }
    println!("  {:<16} {}", "custom", ExperimentKind::Custom.description());
    println!("\nconfig schema: see docs/run-config.md in the repository");
}

fn run_command(
    config_path: &Path,
    out_flag: Option<PathBuf>,
    seed_flag: Option<u64>,
    k_flag: Option<f64>,
    dt_flag: Option<f64>,
    jobs: usize,
) -> Result<(), CliError> {
    if jobs == 0 {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }
    let text = std::fs::read_to_string(config_path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", config_path.display())))?;
    let config: RunConfig = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("{} is not a valid run config: {e}", config_path.display())))?;

    let kind = config.experiment;
    let custom_scenario = match kind {
        ExperimentKind::Custom => {
            let scenario = config
                .scenario
                .ok_or_else(|| CliError::Usage("custom runs need a `scenario` object".into()))?;
            Some(scenario)
        }
        _ => {
            if config.scenario.is_some() {
                return Err(CliError::Usage(
                    "`scenario` is only valid with the custom experiment".into(),
                ));
            }
            None
        }
    };

    let mut params = default_params(kind);
    // A custom scenario carries its own gain, step, duration, and seed;
    // config keys and flags override them, flags winning over keys.
    if let Some(scenario) = &custom_scenario {
        params.k = scenario.cfg.k;
        params.dt = scenario.cfg.dt;
        params.duration = scenario.duration;
        params.seed = scenario.seed;
    }
    if let Some(k) = k_flag.or(config.k) {
        params.k = k;
    }
    if let Some(dt) = dt_flag.or(config.dt) {
        params.dt = dt;
    }
    if let Some(d) = config.duration {
        params.duration = d;
    }
    if let Some(s) = seed_flag.or(config.seed) {
        params.seed = s;
    }
    if let Some(m) = config.min_spectral_radius {
        params.min_spectral_radius = m;
    }
    if let Some(d) = config.damping {
        params.damping = d;
    }
    if config.expect.is_some() {
        params.expect = config.expect;
    }
    let seeds: Vec<u64> = match (seed_flag, &config.seeds) {
        (Some(s), _) => vec![s],
        (None, Some(list)) if !list.is_empty() => list.clone(),
        _ => vec![params.seed],
    };

    if !(params.k > 0.0 && params.k.is_finite()) {
        return Err(CliError::Usage(format!("gain must be positive, got {}", params.k)));
    }
    if !(params.dt > 0.0 && params.dt.is_finite()) {
        return Err(CliError::Usage(format!("dt must be positive, got {}", params.dt)));
    }
    if !(params.duration > 0.0 && params.duration.is_finite()) {
        return Err(CliError::Usage(format!(
            "duration must be positive, got {}",
            params.duration
        )));
    }
    if params.k * params.dt >= 2.0 {
        return Err(CliError::Usage(format!(
            "k·dt must stay below 2 for stability, got {}",
            params.k * params.dt
        )));
    }

    let out_root = out_flag
        .or(config.out)
        .unwrap_or_else(|| PathBuf::from("runs").join(kind.name()));

    if seeds.len() == 1 {
        let summary = execute_one(kind, &params, seeds[0], custom_scenario.as_ref(), &out_root)?;
        report_line(&summary, &out_root);
        if summary.passed {
            Ok(())
        } else {
            Err(CliError::Runtime(format!(
                "run did not pass; see {}",
                out_root.join("summary.json").display()
            )))
        }
    } else {
        run_sweep(kind, &params, &seeds, custom_scenario.as_ref(), &out_root, jobs)
    }
}

/// Run several seeds, `jobs` at a time, each into its own subdirectory.
fn run_sweep(
    kind: ExperimentKind,
    params: &RunParams,
    seeds: &[u64],
    custom: Option<&Scenario>,
    out_root: &Path,
    jobs: usize,
) -> Result<(), CliError> {
    let work = Mutex::new(seeds.iter().copied());
    let results: Mutex<Vec<Result<Summary, CliError>>> = Mutex::new(Vec::new());
    std::thread::scope(|scope| {
        for _ in 0..jobs.min(seeds.len()) {
            scope.spawn(|| loop {
                let next = work.lock().expect("seed queue poisoned").next();
                let Some(seed) = next else { break };
                let dir = out_root.join(format!("seed_{seed}"));
                let outcome = execute_one(kind, params, seed, custom, &dir);
                results.lock().expect("result sink poisoned").push(outcome);
            });
        }
    });
    let results = results.into_inner().expect("result sink poisoned");
    let mut all_passed = true;
    for res in results {
        let summary = res?;
        report_line(&summary, &out_root.join(format!("seed_{}", summary.seed)));
        all_passed &= summary.passed;
    }
    if all_passed {
        Ok(())
    } else {
        Err(CliError::Runtime(format!(
            "at least one sweep run failed; see {}",
            out_root.display()
        )))
    }
}

fn report_line(summary: &Summary, dir: &Path) {
    let status = if summary.passed { "pass" } else { "FAIL" };
    match summary.decay_rate {
        Some(rate) => println!(
            "{}: {} (seed {}, decay rate {:.4}, {} rows) -> {}",
            summary.experiment,
            status,
            summary.seed,
            rate,
            summary.rows,
            dir.display()
        ),
        None => println!(
            "{}: {} (seed {}) -> {}",
            summary.experiment,
            status,
            summary.seed,
            dir.display()
        ),
    }
}

/// Execute one experiment instance and write its artifacts.
fn execute_one(
    kind: ExperimentKind,
    params: &RunParams,
    seed: u64,
    custom: Option<&Scenario>,
    dir: &Path,
) -> Result<Summary, CliError> {
    let mut params = params.clone();
    params.seed = seed;
    let started = Instant::now();

    let (outcome, group, k, dt, duration): (Result<SimRecord, _>, String, f64, f64, f64) =
        match kind {
            ExperimentKind::ArmHelix => (
                run_arm_helix(&params),
                "SE(3)".to_string(),
                params.k,
                params.dt,
                params.duration,
            ),
            ExperimentKind::Custom => {
                let mut scenario = custom.expect("custom scenario checked earlier").clone();
                scenario.cfg.k = params.k;
                scenario.cfg.dt = params.dt;
                scenario.duration = params.duration;
                scenario.seed = seed;
                scenario
                    .validate()
                    .map_err(|e| CliError::Usage(format!("invalid scenario: {e}")))?;
                (
                    run_tracking(&scenario),
                    scenario.tag.to_string(),
                    scenario.cfg.k,
                    scenario.cfg.dt,
                    scenario.duration,
                )
            }
            _ => match run_simulator_builtin(kind, &params) {
                Ok((record, tag)) => (
                    Ok(record),
                    tag.to_string(),
                    params.k,
                    params.dt,
                    params.duration,
                ),
                Err(e) => (Err(e), String::new(), params.k, params.dt, params.duration),
            },
        };

    let base = blank_summary(kind.name(), &group, k, dt, duration, seed);
    let (summary, record) = match outcome {
        Ok(record) => {
            let summary = summarize_success(base, &record, params.expect.as_ref());
            (summary, Some(record))
        }
        Err(err) => (summarize_failure(base, &err), None),
    };
    let mut summary = summary;
    summary.runtime_seconds = started.elapsed().as_secs_f64();
    write_artifacts(dir, record.as_ref(), &summary)
        .map_err(|e| CliError::Runtime(format!("cannot write artifacts to {}: {e}", dir.display())))?;
    Ok(summary)
}
