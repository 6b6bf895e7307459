//! Output files: metrics document, plot tables and an optional gnuplot
//! script. Every file is written atomically.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use salvo_core::simulator::{InterceptorSample, Sample};
use salvo_core::{RunMetrics, TrajectoryLog};
use serde::{Deserialize, Serialize};

use crate::error::{AppError, Result};
use crate::trajectory::autopilot_name;

/// Writes `contents` to a temporary file beside `path`, then renames it.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).map_err(|e| AppError::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| AppError::io(dir, e))?;
    tmp.write_all(contents).map_err(|e| AppError::io(path, e))?;
    tmp.persist(path).map_err(|e| AppError::io(path, e.error))?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsDocument {
    pub scenario: String,
    pub autopilot: String,
    /// Leader first; per-interceptor metric vectors follow this order.
    pub names: Vec<String>,
    pub metrics: RunMetrics,
}

impl MetricsDocument {
    pub fn new(log: &TrajectoryLog, metrics: RunMetrics) -> Self {
        MetricsDocument {
            scenario: log.scenario.clone(),
            autopilot: autopilot_name(log.autopilot).to_string(),
            names: log.names.clone(),
            metrics,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("metrics always serialize");
        s.push('\n');
        s
    }
}

type Column<'a> = (String, Box<dyn Fn(&Sample) -> String + 'a>);

fn table(log: &TrajectoryLog, columns: Vec<Column<'_>>) -> String {
    let mut out = String::from("# t");
    for (name, _) in &columns {
        write!(out, " {name}").unwrap();
    }
    out.push('\n');
    for s in &log.samples {
        write!(out, "{}", s.t).unwrap();
        for (_, f) in &columns {
            write!(out, " {}", f(s)).unwrap();
        }
        out.push('\n');
    }
    out
}

type Field = fn(&InterceptorSample) -> f64;

/// For each interceptor in turn, one column per field.
fn per_interceptor<'a>(log: &'a TrajectoryLog, fields: &[(&str, Field)]) -> Vec<Column<'a>> {
    let mut cols: Vec<Column<'a>> = Vec::new();
    for (i, name) in log.names.iter().enumerate() {
        for &(suffix, f) in fields {
            cols.push((
                format!("{name}.{suffix}"),
                Box::new(move |s| f(&s.interceptors[i]).to_string()),
            ));
        }
    }
    cols
}

/// Whitespace-separated tables, one per figure, keyed by file stem.
pub fn plot_tables(log: &TrajectoryLog) -> Vec<(&'static str, String)> {
    let mut consensus: Vec<Column<'_>> = vec![
        ("delta_norm".into(), Box::new(|s| s.delta_norm.to_string())),
        ("lyap_v".into(), Box::new(|s| s.lyap_v.to_string())),
        (
            "lyap_vz".into(),
            Box::new(|s| s.lyap_vz.map_or_else(|| "NaN".into(), |v| v.to_string())),
        ),
    ];
    consensus.extend(per_interceptor(log, &[("err", |s| s.error)]));
    vec![
        (
            "trajectory",
            table(log, per_interceptor(log, &[("x", |s| s.x), ("y", |s| s.y)])),
        ),
        ("tgo", table(log, per_interceptor(log, &[("tgo", |s| s.tgo)]))),
        (
            "accel",
            table(log, per_interceptor(log, &[("a_m", |s| s.a_m), ("a_mc", |s| s.a_mc)])),
        ),
        (
            "heading",
            table(
                log,
                per_interceptor(log, &[("theta_m_deg", |s| s.theta_m.to_degrees())]),
            ),
        ),
        ("consensus", table(log, consensus)),
    ]
}

/// Gnuplot script rendering the plot tables to PNG files beside it.
pub fn gnuplot_script(log: &TrajectoryLog) -> String {
    let n = log.names.len();
    let mut s = String::new();
    writeln!(s, "# Render with: gnuplot plots.gp").unwrap();
    writeln!(s, "set terminal pngcairo size 900,600").unwrap();
    writeln!(s, "set grid").unwrap();
    let series = |file: &str, col: &dyn Fn(usize) -> (usize, usize), title: &dyn Fn(usize) -> String| {
        (0..n)
            .map(|i| {
                let (x, y) = col(i);
                format!("'{file}.dat' using {x}:{y} with lines title '{}'", title(i))
            })
            .collect::<Vec<_>>()
            .join(", \\\n     ")
    };
    let name = |i: usize| log.names[i].clone();
    writeln!(s, "\nset output 'trajectory.png'\nset title 'Trajectories'\nset xlabel 'x (m)'\nset ylabel 'y (m)'\nset size ratio -1").unwrap();
    writeln!(s, "plot {}", series("trajectory", &|i| (2 + 2 * i, 3 + 2 * i), &name)).unwrap();
    writeln!(s, "set size noratio").unwrap();
    writeln!(
        s,
        "\nset output 'tgo.png'\nset title 'Time-to-go'\nset xlabel 't (s)'\nset ylabel 't_go (s)'"
    )
    .unwrap();
    writeln!(s, "plot {}", series("tgo", &|i| (1, 2 + i), &name)).unwrap();
    writeln!(
        s,
        "\nset output 'accel.png'\nset title 'Lateral acceleration'\nset ylabel 'a_M (m/s^2)'"
    )
    .unwrap();
    writeln!(s, "plot {}", series("accel", &|i| (1, 2 + 2 * i), &name)).unwrap();
    writeln!(
        s,
        "\nset output 'heading.png'\nset title 'Heading error'\nset ylabel 'theta_M (deg)'"
    )
    .unwrap();
    writeln!(s, "plot {}", series("heading", &|i| (1, 2 + i), &name)).unwrap();
    writeln!(
        s,
        "\nset output 'consensus.png'\nset title 'Consensus error'\nset ylabel '||delta|| (s)'\nset logscale y"
    )
    .unwrap();
    writeln!(s, "plot 'consensus.dat' using 1:2 with lines title '||delta||'").unwrap();
    s
}

/// Writes `plots/*.dat` (and `plots/plots.gp` if asked) under `dir`.
pub fn write_plots(dir: &Path, log: &TrajectoryLog, gnuplot: bool) -> Result<()> {
    let plots = dir.join("plots");
    for (stem, body) in plot_tables(log) {
        write_atomic(&plots.join(format!("{stem}.dat")), body.as_bytes())?;
    }
    if gnuplot {
        write_atomic(&plots.join("plots.gp"), gnuplot_script(log).as_bytes())?;
    }
    Ok(())
}
