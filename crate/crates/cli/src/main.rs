//! `nestersolve`: reproduces the coefficient tables, region maps, damping
//! sweep and solver comparisons as CSV and JSON.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nestersolve::experiment::Acceleration;
use serde_json::json;

#[derive(Debug, Parser)]
#[command(name = "nestersolve", version, about)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Overrides the seed of configs and sweeps.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Leaves timing columns empty and sets summary seconds to null, so
    /// reruns are byte-identical.
    #[arg(long, global = true)]
    no_timing: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Optimal momentum coefficient and rate for eigenvalue bounds.
    Coef {
        #[arg(long, allow_negative_numbers = true)]
        b1: f64,
        #[arg(long = "bN", alias = "bn", allow_negative_numbers = true)]
        bn: f64,
        /// Print JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// Nesterov and Chebyshev rates over a square of the complex plane.
    Region {
        #[arg(long, allow_negative_numbers = true)]
        b1: f64,
        #[arg(long = "bN", alias = "bn", allow_negative_numbers = true)]
        bn: f64,
        /// Points per axis.
        #[arg(long, default_value_t = 401)]
        grid: usize,
        /// Half-width of the square centred at the origin.
        #[arg(long, default_value_t = 1.0)]
        half_width: f64,
        /// CSV destination; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Predicted and measured factors of V(1,0) Jacobi cycles on Poisson
    /// as the damping factor varies.
    DampingSweep {
        #[arg(long, default_value_t = 0.55)]
        omega_min: f64,
        #[arg(long, default_value_t = 1.0)]
        omega_max: f64,
        #[arg(long, default_value_t = 0.05)]
        step: f64,
        #[arg(long, default_value_t = 255)]
        n: usize,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, default_value_t = 300)]
        max_iter: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Runs one configured solve.
    Solve {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the configured acceleration.
        #[arg(long)]
        method: Option<Method>,
        /// Trace CSV destination; defaults to the config's `output`.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Summary JSON destination; standard output when absent.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Runs several solves and writes one trace per run plus a combined
    /// `summary.json`.
    Compare {
        #[arg(long = "config", required = true)]
        configs: Vec<PathBuf>,
        /// Runs each config with every listed method instead of its own.
        #[arg(long, value_delimiter = ',')]
        methods: Vec<Method>,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Power-method estimate of the extreme eigenvalues of a sweep.
    Estimate {
        /// Experiment config whose unaccelerated cycle is analysed.
        #[arg(long, conflicts_with = "diagonal", required_unless_present = "diagonal")]
        config: Option<PathBuf>,
        /// Synthetic diagonal sweep with these eigenvalues.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        diagonal: Option<Vec<f64>>,
        #[arg(long, default_value_t = 100)]
        iters: usize,
        /// Shift for the opposite end; defaults to the dominant estimate.
        #[arg(long, allow_negative_numbers = true)]
        shift: Option<f64>,
    },
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum Method {
    None,
    Nesterov,
    Chebyshev,
    Pcg,
    Gmres,
}

impl From<Method> for Acceleration {
    fn from(m: Method) -> Self {
        match m {
            Method::None => Acceleration::None,
            Method::Nesterov => Acceleration::Nesterov,
            Method::Chebyshev => Acceleration::Chebyshev,
            Method::Pcg => Acceleration::Pcg,
            Method::Gmres => Acceleration::Gmres,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            report(&json!({ "kind": "usage", "message": e.to_string().trim_end() }));
            return ExitCode::from(2);
        }
    };
    if let Err(e) = configure_threads() {
        report(&commands::error_json(&e));
        return ExitCode::FAILURE;
    }
    let common = cli.common;
    let result = match cli.command {
        Command::Coef { b1, bn, json } => commands::coef(b1, bn, json),
        Command::Region { b1, bn, grid, half_width, out } => commands::region(b1, bn, grid, half_width, out),
        Command::DampingSweep { omega_min, omega_max, step, n, tol, max_iter, out } => {
            let mut sweep = nestersolve::experiment::DampingSweep {
                omega_min,
                omega_max,
                step,
                n,
                tol,
                max_iter,
                ..Default::default()
            };
            if let Some(seed) = common.seed {
                sweep.seed = seed;
            }
            commands::damping(&sweep, out)
        }
        Command::Solve { config, method, trace, summary } => {
            commands::solve(&common, &config, method, trace, summary)
        }
        Command::Compare { configs, methods, out_dir } => commands::compare(&common, &configs, &methods, &out_dir),
        Command::Estimate { config, diagonal, iters, shift } => {
            commands::estimate(&common, config.as_deref(), diagonal, iters, shift)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            report(&commands::error_json(&e));
            ExitCode::FAILURE
        }
    }
}

/// Caps the worker pool at `NESTERSOLVE_THREADS` when set.
fn configure_threads() -> anyhow::Result<()> {
    let Ok(value) = std::env::var("NESTERSOLVE_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| anyhow::anyhow!("NESTERSOLVE_THREADS must be a positive integer, got {value:?}"))?;
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    Ok(())
}

fn report(err: &serde_json::Value) {
    eprintln!("{}", json!({ "error": err }));
}
