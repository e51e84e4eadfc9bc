use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use nestersolve::analysis::power_extreme_eigs;
use nestersolve::experiment::{
    damping_sweep, run_with_setup, smoothing_bounds, write_damping_csv, DampingSweep, ExperimentConfig,
    ExperimentOutcome, Setup,
};
use nestersolve::linalg::DEFAULT_SEED;
use nestersolve::solvers::DiagonalSweep;
use nestersolve::spectral::{acceleration_ratio, optimal_coefficient, region_scan, RegionGrid, SpectrumBounds};
use nestersolve::{Error, IterationTrace};
use serde_json::{json, Value};

use crate::{Common, Method};

pub fn error_json(e: &anyhow::Error) -> Value {
    let message = format!("{e:#}");
    if let Some(err) = e.downcast_ref::<Error>() {
        let mut v = json!({ "kind": error_kind(err), "message": message });
        if let Error::Diverged(trace) = err {
            v["iterations"] = json!(trace.iterations());
        }
        return v;
    }
    let kind = if e.downcast_ref::<io::Error>().is_some() {
        "io"
    } else if e.downcast_ref::<serde_json::Error>().is_some() {
        "config"
    } else {
        "error"
    };
    json!({ "kind": kind, "message": message })
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::DimensionMismatch { .. } => "dimension_mismatch",
        Error::InvalidBounds(_) => "invalid_bounds",
        Error::InvalidArgument(_) => "invalid_argument",
        Error::DivergentMap => "divergent_map",
        Error::AccelerationRatioUndefined => "acceleration_ratio_undefined",
        Error::ZeroDiagonal(_) => "zero_diagonal",
        Error::InsufficientRecords { .. } => "insufficient_records",
        Error::Indefinite(_) => "indefinite",
        Error::Diverged(_) => "diverged",
        Error::SingularCoarseOperator => "singular_coarse_operator",
    }
}

/// Standard output, or a buffered file when `path` is given.
fn sink(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => {
            let f = File::create(p).with_context(|| format!("cannot create {}", p.display()))?;
            Box::new(BufWriter::new(f))
        }
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub fn coef(b1: f64, bn: f64, as_json: bool) -> anyhow::Result<()> {
    let bounds = SpectrumBounds::new(b1, bn)?;
    let opt = optimal_coefficient(&bounds);
    let ar = acceleration_ratio(&bounds).ok();
    if as_json {
        let v = json!({
            "b1": b1,
            "bN": bn,
            "c_star": opt.c_star,
            "r_star": opt.r_star,
            "regime": opt.regime,
            "robustness_radius": opt.robustness_radius,
            "acceleration_ratio": ar,
            "extended": opt.extended,
        });
        println!("{}", serde_json::to_string_pretty(&v)?);
        return Ok(());
    }
    println!("c*        {:.9}", opt.c_star);
    println!("r*        {:.9}", opt.r_star);
    println!("regime    {}", opt.regime);
    println!("radius    {:.9}", opt.robustness_radius);
    match ar {
        Some(ar) => println!("AR        {ar:.9}"),
        None => println!("AR        undefined"),
    }
    if opt.extended {
        println!("extended  b1 <= -1: the robustness radius is unproven in this range");
    }
    Ok(())
}

pub fn region(b1: f64, bn: f64, points: usize, half_width: f64, out: Option<PathBuf>) -> anyhow::Result<()> {
    if points < 3 {
        bail!(Error::InvalidArgument(format!("--grid needs at least 3 points, got {points}")));
    }
    if !(half_width > 0.0 && half_width.is_finite()) {
        bail!(Error::InvalidArgument(format!("--half-width must be positive, got {half_width}")));
    }
    let bounds = SpectrumBounds::new(b1, bn)?;
    let map = region_scan(&bounds, &RegionGrid::square(half_width, points)?)?;
    let mut w = sink(out.as_deref())?;
    map.write_csv(&mut w)?;
    w.flush()?;
    Ok(())
}

pub fn damping(sweep: &DampingSweep, out: Option<PathBuf>) -> anyhow::Result<()> {
    let rows = damping_sweep(sweep)?;
    let mut w = sink(out.as_deref())?;
    write_damping_csv(&rows, &mut w)?;
    w.flush()?;
    Ok(())
}

fn load_config(path: &Path, common: &Common) -> anyhow::Result<ExperimentConfig> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let mut config: ExperimentConfig =
        serde_json::from_str(&text).with_context(|| format!("invalid config {}", path.display()))?;
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
    Ok(config)
}

fn write_trace(trace: &IterationTrace, path: &Path, timing: bool) -> anyhow::Result<()> {
    let f = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    let mut w = BufWriter::new(f);
    trace.write_csv(&mut w, timing)?;
    w.flush()?;
    Ok(())
}

/// Runs `config`, writing the trace to `trace_path` also when the
/// iteration diverges.
fn run_one(
    config: &ExperimentConfig,
    setup: &Setup,
    trace_path: Option<&Path>,
    common: &Common,
) -> anyhow::Result<ExperimentOutcome> {
    let timing = !common.no_timing;
    match run_with_setup(config, setup) {
        Ok(mut outcome) => {
            if common.no_timing {
                outcome.summary.seconds = None;
            }
            if let Some(p) = trace_path {
                write_trace(&outcome.trace, p, timing)?;
            }
            Ok(outcome)
        }
        Err(Error::Diverged(trace)) => {
            let Some(p) = trace_path else {
                return Err(Error::Diverged(trace).into());
            };
            write_trace(&trace, p, timing)?;
            let msg = format!("partial trace written to {}", p.display());
            Err(anyhow::Error::from(Error::Diverged(trace)).context(msg))
        }
        Err(e) => Err(e.into()),
    }
}

pub fn solve(
    common: &Common,
    config_path: &Path,
    method: Option<Method>,
    trace: Option<PathBuf>,
    summary: Option<PathBuf>,
) -> anyhow::Result<()> {
    let mut config = load_config(config_path, common)?;
    if let Some(m) = method {
        config.acceleration = m.into();
    }
    let setup = Setup::new(&config)?;
    let trace_path = trace.or_else(|| config.output.clone());
    let outcome = run_one(&config, &setup, trace_path.as_deref(), common)?;
    let mut w = sink(summary.as_deref())?;
    serde_json::to_writer_pretty(&mut w, &outcome.summary)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

pub fn compare(common: &Common, configs: &[PathBuf], methods: &[Method], out_dir: &Path) -> anyhow::Result<()> {
    fs::create_dir_all(out_dir).with_context(|| format!("cannot create {}", out_dir.display()))?;
    let mut entries = Vec::new();
    let mut failures = 0;
    for path in configs {
        let config = load_config(path, common)?;
        let setup = Setup::new(&config)?;
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("run");
        let accelerations: Vec<_> = if methods.is_empty() {
            vec![config.acceleration]
        } else {
            methods.iter().map(|&m| m.into()).collect()
        };
        for acceleration in accelerations {
            let run = ExperimentConfig { acceleration, ..config.clone() };
            let label = format!("{stem}_{}", acceleration.name());
            let trace_path = out_dir.join(format!("{label}.csv"));
            let entry = match run_one(&run, &setup, Some(&trace_path), common) {
                Ok(outcome) => {
                    println!(
                        "{label:<32} {:>5} iterations  converged {:<5}  acf {}",
                        outcome.summary.iterations,
                        outcome.summary.converged,
                        outcome.summary.acf.map_or("-".into(), |a| format!("{a:.4}")),
                    );
                    json!({ "label": label, "trace": trace_path, "summary": outcome.summary })
                }
                Err(e) => {
                    failures += 1;
                    println!("{label:<32} failed: {e:#}");
                    json!({ "label": label, "trace": trace_path, "error": error_json(&e) })
                }
            };
            entries.push(entry);
        }
    }
    let summary_path = out_dir.join("summary.json");
    let mut w = sink(Some(&summary_path))?;
    serde_json::to_writer_pretty(&mut w, &entries)?;
    writeln!(w)?;
    w.flush()?;
    if failures > 0 {
        bail!("{failures} of {} runs failed; see {}", entries.len(), summary_path.display());
    }
    Ok(())
}

pub fn estimate(
    common: &Common,
    config_path: Option<&Path>,
    diagonal: Option<Vec<f64>>,
    iters: usize,
    shift: Option<f64>,
) -> anyhow::Result<()> {
    let report = match (config_path, diagonal) {
        (_, Some(diag)) => {
            let seed = common.seed.unwrap_or(DEFAULT_SEED);
            let est = power_extreme_eigs(&DiagonalSweep::new(diag.clone()), iters, shift, seed)?;
            json!({ "diagonal": diag, "iters": iters, "seed": seed, "power": est })
        }
        (Some(path), None) => {
            let config = load_config(path, common)?;
            let setup = Setup::new(&config)?;
            let est = power_extreme_eigs(&setup.hierarchy, iters, shift, config.seed)?;
            json!({
                "problem": config.problem,
                "n": config.n,
                "relax": config.relax,
                "nu1": config.nu1,
                "nu2": config.nu2,
                "levels": setup.hierarchy.level_sizes(),
                "iters": iters,
                "seed": config.seed,
                "power": est,
                "smoothing": smoothing_bounds(&config).ok(),
            })
        }
        (None, None) => bail!(Error::InvalidArgument("estimate needs --config or --diagonal".into())),
    };
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}
