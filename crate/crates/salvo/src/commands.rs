//! Subcommand implementations. Each returns the process exit code and
//! writes its report to the given sink; errors are reported by the caller.

use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use salvo_core::presets::preset_catalog;
use salvo_core::{preset, RunMetrics, Scenario, TrajectoryLog};

use crate::error::{exit, AppError, Result};
use crate::export::{write_atomic, write_plots, MetricsDocument};
use crate::scenario_file::{load, load_unvalidated, to_toml_string};
use crate::trajectory::{self, autopilot_name, Format};

#[derive(Debug, Clone)]
pub struct RunOptions {
    /// Preset names or scenario file paths.
    pub scenarios: Vec<String>,
    /// Each scenario writes into `out/<scenario name>/`.
    pub out: PathBuf,
    pub format: Format,
    pub dt: Option<f64>,
    pub overrides: Vec<String>,
    pub jobs: Option<usize>,
    pub gnuplot: bool,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub dir: PathBuf,
    pub trajectory_path: PathBuf,
    pub log: TrajectoryLog,
    pub metrics: RunMetrics,
}

fn all_overrides(opts: &RunOptions) -> Vec<String> {
    let mut v = opts.overrides.clone();
    if let Some(dt) = opts.dt {
        v.push(format!("sim.dt={dt:?}"));
    }
    v
}

/// Loads, validates, simulates and writes one scenario.
pub fn run_one(reference: &str, opts: &RunOptions) -> Result<RunOutcome> {
    let scenario = load(reference, &all_overrides(opts))?;
    let (log, metrics) = salvo_core::run(&scenario)?;
    let dir = opts.out.join(&scenario.name);
    let trajectory_path = dir.join(format!("trajectory.{}", opts.format.extension()));
    write_atomic(&trajectory_path, trajectory::encode(&log, opts.format).as_bytes())?;
    let doc = MetricsDocument::new(&log, metrics.clone());
    write_atomic(&dir.join("metrics.json"), doc.to_json().as_bytes())?;
    write_atomic(&dir.join("scenario.toml"), to_toml_string(&scenario).as_bytes())?;
    write_plots(&dir, &log, opts.gnuplot)?;
    Ok(RunOutcome {
        dir,
        trajectory_path,
        log,
        metrics,
    })
}

fn fmt_opt(v: Option<f64>, precision: usize) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.precision$}"))
}

/// One-screen summary of a run.
pub fn summary(log: &TrajectoryLog, m: &RunMetrics) -> String {
    let mut s = format!(
        "{} ({}, {} interceptors)\n",
        log.scenario,
        autopilot_name(log.autopilot),
        log.names.len()
    );
    s.push_str(&format!(
        "  {:<8} {:>12} {:>10} {:>14} {:>8}\n",
        "name", "impact [s]", "miss [m]", "max|a| [m/s2]", "sat [s]"
    ));
    for (i, name) in log.names.iter().enumerate() {
        s.push_str(&format!(
            "  {:<8} {:>12} {:>10} {:>14.2} {:>8.3}\n",
            name,
            fmt_opt(m.impact_times[i], 6),
            fmt_opt(m.miss_distances[i], 4),
            m.max_abs_accel[i],
            m.saturation_durations[i]
        ));
    }
    s.push_str(&format!(
        "  spread {} s, leader settled {} s, consensus {} s: {}\n",
        m.impact_spread.map_or_else(|| "-".into(), |x| format!("{x:.3e}")),
        fmt_opt(m.leader_convergence_time, 3),
        fmt_opt(m.consensus_time, 3),
        if m.mission_success {
            "all intercepted"
        } else {
            "MISSION FAILED"
        }
    ));
    s
}

pub fn cmd_run(opts: &RunOptions, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    let work = || -> Vec<Result<RunOutcome>> { opts.scenarios.par_iter().map(|r| run_one(r, opts)).collect() };
    let results = match opts.jobs {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(work),
            Err(e) => {
                let _ = writeln!(err, "error: cannot start {n} worker threads: {e}");
                return exit::IO;
            }
        },
        None => work(),
    };
    let mut code = exit::SUCCESS;
    for (reference, result) in opts.scenarios.iter().zip(results) {
        match result {
            Ok(o) => {
                let _ = write!(out, "{}", summary(&o.log, &o.metrics));
                let _ = writeln!(out, "  wrote {}", o.dir.display());
                if !o.metrics.mission_success {
                    code = code.max(exit::MISSION_FAILURE);
                }
            }
            Err(e) => {
                let _ = writeln!(err, "error: {reference}: {e}");
                code = code.max(e.exit_code());
            }
        }
    }
    code
}

fn validate_one(reference: &str, overrides: &[String], out: &mut dyn Write) -> Result<bool> {
    let s: Scenario = load_unvalidated(reference, overrides)?;
    let rep = s.validate();
    let _ = writeln!(out, "{} ({})", s.name, autopilot_name(s.autopilot));
    if let Some(l) = rep.lambda_min {
        let _ = writeln!(out, "  lambda_min    {l:.7}");
        let _ = writeln!(out, "  1/lambda_min  {:.4}", 1.0 / l);
    }
    if let Some(f) = rep.time_floor {
        let _ = writeln!(
            out,
            "  time floor    {f:.6} s (eps_t {}, dt {})",
            s.guidance.eps_t, s.sim.dt
        );
    }
    for c in &rep.checks {
        let _ = writeln!(
            out,
            "  {}  {}: {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
    }
    Ok(rep.passed())
}

pub fn cmd_validate(scenarios: &[String], overrides: &[String], out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    let mut code = exit::SUCCESS;
    for reference in scenarios {
        match validate_one(reference, overrides, out) {
            Ok(true) => {}
            Ok(false) => code = code.max(exit::INVALID),
            Err(e) => {
                let _ = writeln!(err, "error: {reference}: {e}");
                code = code.max(e.exit_code());
            }
        }
    }
    code
}

/// Recomputes metrics from a trajectory file.
pub fn metrics_from_file(path: &Path) -> Result<(TrajectoryLog, RunMetrics)> {
    let log = trajectory::read(path)?;
    let metrics = RunMetrics::from_log(&log);
    Ok((log, metrics))
}

pub fn cmd_metrics(path: &Path, json_out: Option<&Path>, out: &mut dyn Write) -> Result<u8> {
    let (log, metrics) = metrics_from_file(path)?;
    let _ = write!(out, "{}", summary(&log, &metrics));
    if let Some(p) = json_out {
        write_atomic(p, MetricsDocument::new(&log, metrics).to_json().as_bytes())?;
        let _ = writeln!(out, "  wrote {}", p.display());
    }
    Ok(exit::SUCCESS)
}

pub fn cmd_presets(show: Option<&str>, out: &mut dyn Write) -> Result<u8> {
    match show {
        Some(name) => {
            let s = preset(name)
                .ok_or_else(|| AppError::UnknownScenario(name.to_string(), salvo_core::presets::preset_list()))?;
            let _ = write!(out, "{}", to_toml_string(&s));
        }
        None => {
            for p in preset_catalog() {
                let _ = writeln!(out, "{:<16} {}", p.name, p.description);
            }
        }
    }
    Ok(exit::SUCCESS)
}
