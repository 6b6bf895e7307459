use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use salvo::commands::{self, RunOptions};
use salvo::error::AppError;
use salvo::trajectory::Format;

/// Cooperative salvo guidance: simulate leader-follower engagements that
/// strike a stationary target at a common, prescribed time.
#[derive(Parser)]
#[command(name = "salvo", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate scenarios and write trajectory, metrics and plot data.
    Run {
        /// Preset name or scenario TOML file; repeat to run several.
        #[arg(short, long = "scenario", required = true)]
        scenarios: Vec<String>,
        /// Output root; each scenario writes into <out>/<name>/.
        #[arg(short, long, default_value = "out")]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        /// Integration step, s (overrides sim.dt).
        #[arg(long)]
        dt: Option<f64>,
        /// Dotted-path edit such as guidance.eta_f=12 or interceptor.F2.speed=250.
        #[arg(long = "override", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        /// Scenarios simulated in parallel (default: all cores).
        #[arg(short, long)]
        jobs: Option<usize>,
        /// Also write plots/plots.gp.
        #[arg(long)]
        gnuplot: bool,
    },
    /// Check a scenario's gains, ordering and parameters without running it.
    Validate {
        #[arg(required = true)]
        scenarios: Vec<String>,
        #[arg(long = "override", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Recompute metrics from a trajectory file (CSV or JSON).
    Metrics {
        trajectory: PathBuf,
        /// Write the metrics document here.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// List the built-in scenarios, or print one as TOML.
    Presets {
        #[arg(long, value_name = "NAME")]
        show: Option<String>,
    },
}

fn report(result: Result<u8, AppError>) -> u8 {
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        e.exit_code()
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut stdout = std::io::stdout().lock();
    let mut stderr = std::io::stderr().lock();
    let code = match cli.command {
        Command::Run {
            scenarios,
            out,
            format,
            dt,
            overrides,
            jobs,
            gnuplot,
        } => commands::cmd_run(
            &RunOptions {
                scenarios,
                out,
                format,
                dt,
                overrides,
                jobs,
                gnuplot,
            },
            &mut stdout,
            &mut stderr,
        ),
        Command::Validate { scenarios, overrides } => {
            commands::cmd_validate(&scenarios, &overrides, &mut stdout, &mut stderr)
        }
        Command::Metrics { trajectory, out } => report(commands::cmd_metrics(&trajectory, out.as_deref(), &mut stdout)),
        Command::Presets { show } => report(commands::cmd_presets(show.as_deref(), &mut stdout)),
    };
    ExitCode::from(code)
}
