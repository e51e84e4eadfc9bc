//! Configured solver runs on the multigrid model problems, shared by the
//! command-line tool and the acceptance suite.

use std::io::{self, Write};
use std::path::PathBuf;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::analysis::{power_extreme_eigs, smoothing_range, PowerEstimate, SymbolRange};
use crate::error::{Error, Result};
use crate::linalg::{random_vector, DEFAULT_SEED};
use crate::multigrid::{Coarsening, CycleSpec, MultigridHierarchy, Problem, ProblemKind, Relaxation};
use crate::report::format_sig;
use crate::solvers::{
    acf_estimate, chebyshev_solve, gmres_solve, nesterov_solve, pcg_solve, plain_solve, IterationTrace,
    SolveOutput, StopRule,
};
use crate::spectral::{
    chebyshev_asymptotic_rate, optimal_coefficient, ChebyshevParams, OptimalAcceleration, SpectrumBounds,
};

/// Grid resolution used for Fourier smoothing analysis in experiments.
pub const SMOOTHING_RESOLUTION: usize = 257;
/// Number of trailing convergence factors averaged into an ACF.
pub const ACF_WINDOW: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Acceleration {
    #[default]
    None,
    Nesterov,
    Chebyshev,
    Pcg,
    Gmres,
}

impl Acceleration {
    pub const ALL: [Acceleration; 5] = [Self::None, Self::Nesterov, Self::Chebyshev, Self::Pcg, Self::Gmres];

    pub fn name(&self) -> &'static str {
        match self {
            Self::None => "none",
            Self::Nesterov => "nesterov",
            Self::Chebyshev => "chebyshev",
            Self::Pcg => "pcg",
            Self::Gmres => "gmres",
        }
    }

    pub fn needs_bounds(&self) -> bool {
        matches!(self, Self::Nesterov | Self::Chebyshev)
    }
}

/// Where `b1` and `bN` come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundSource {
    /// Fourier smoothing analysis of damped Jacobi (Poisson only).
    Smoothing,
    /// Same as `Smoothing`.
    Analytic,
    /// Power method on the unaccelerated cycle.
    #[default]
    Power,
    /// `b1` and `bN` given in the configuration.
    Explicit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: ProblemKind,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_relax")]
    pub relax: Relaxation,
    #[serde(default = "default_one")]
    pub nu1: usize,
    #[serde(default = "default_one")]
    pub nu2: usize,
    /// Defaults to rediscretization for Poisson and Galerkin otherwise.
    #[serde(default)]
    pub coarsening: Option<Coarsening>,
    #[serde(default)]
    pub acceleration: Acceleration,
    #[serde(default)]
    pub bounds: BoundSource,
    #[serde(default)]
    pub b1: Option<f64>,
    #[serde(default, rename = "bN", alias = "bn")]
    pub bn: Option<f64>,
    /// Replace the estimated `b1` by 0.
    #[serde(default)]
    pub assume_b1_zero: bool,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_power_iters")]
    pub power_iters: usize,
    /// Trace CSV destination, used by the command-line tool.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

fn default_n() -> usize {
    127
}
fn default_seed() -> u64 {
    DEFAULT_SEED
}
fn default_relax() -> Relaxation {
    Relaxation::Jacobi { omega: 0.8 }
}
fn default_one() -> usize {
    1
}
fn default_tol() -> f64 {
    1e-8
}
fn default_max_iter() -> usize {
    1000
}
fn default_power_iters() -> usize {
    100
}

impl ExperimentConfig {
    pub fn new(problem: ProblemKind, n: usize) -> Self {
        Self {
            problem,
            n,
            seed: default_seed(),
            relax: default_relax(),
            nu1: 1,
            nu2: 1,
            coarsening: None,
            acceleration: Acceleration::None,
            bounds: BoundSource::default(),
            b1: None,
            bn: None,
            assume_b1_zero: false,
            tol: default_tol(),
            max_iter: default_max_iter(),
            power_iters: default_power_iters(),
            output: None,
        }
    }

    pub fn coarsening(&self) -> Coarsening {
        self.coarsening.unwrap_or(match self.problem {
            ProblemKind::Poisson => Coarsening::Rediscretize,
            _ => Coarsening::Galerkin,
        })
    }

    pub fn cycle_spec(&self) -> CycleSpec {
        CycleSpec::new(self.nu1, self.nu2, self.relax, self.coarsening())
    }

    pub fn stop_rule(&self) -> Result<StopRule> {
        StopRule::new(self.tol, self.max_iter)
    }
}

/// The system, cycle and initial guess of an experiment.
pub struct Setup {
    pub problem: Problem,
    pub hierarchy: MultigridHierarchy,
    pub x0: Vec<f64>,
}

impl Setup {
    pub fn new(config: &ExperimentConfig) -> Result<Self> {
        let problem = Problem::build(config.problem, config.n, config.seed)?;
        let hierarchy = MultigridHierarchy::new(&problem, config.cycle_spec())?;
        let x0 = random_vector(problem.op.dim(), config.seed);
        Ok(Self { problem, hierarchy, x0 })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResolvedBounds {
    pub source: BoundSource,
    pub bounds: SpectrumBounds,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub smoothing: Option<SymbolRange>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub power: Option<PowerEstimate>,
}

/// Determines `(b1, bN)` for the configured cycle.
pub fn resolve_bounds(config: &ExperimentConfig, hierarchy: &MultigridHierarchy) -> Result<ResolvedBounds> {
    let (mut b1, bn, smoothing, power) = match config.bounds {
        BoundSource::Explicit => {
            let bn = config
                .bn
                .ok_or_else(|| Error::InvalidBounds("explicit bounds need bN".into()))?;
            let b1 = match (config.b1, config.assume_b1_zero) {
                (Some(b1), _) => b1,
                (None, true) => 0.0,
                (None, false) => return Err(Error::InvalidBounds("explicit bounds need b1".into())),
            };
            (b1, bn, None, None)
        }
        BoundSource::Smoothing | BoundSource::Analytic => {
            let range = smoothing_bounds(config)?;
            (range.b1_hat, range.bn_hat, Some(range), None)
        }
        BoundSource::Power => {
            let est = power_extreme_eigs(hierarchy, config.power_iters, None, config.seed)?;
            (est.lower(), est.upper(), None, Some(est))
        }
    };
    if config.assume_b1_zero {
        b1 = 0.0;
    }
    let bounds = SpectrumBounds::new(b1, bn)?;
    Ok(ResolvedBounds {
        source: config.bounds,
        bounds,
        smoothing,
        power,
    })
}

/// Symbol range of the `ν1 + ν2` Jacobi sweeps of a Poisson cycle.
pub fn smoothing_bounds(config: &ExperimentConfig) -> Result<SymbolRange> {
    let Relaxation::Jacobi { omega } = config.relax else {
        return Err(Error::InvalidArgument(
            "smoothing-analysis bounds are only available for damped Jacobi".into(),
        ));
    };
    if config.problem != ProblemKind::Poisson {
        return Err(Error::InvalidArgument(
            "smoothing-analysis bounds are only available for the Poisson problem".into(),
        ));
    }
    let sweeps = (config.nu1 + config.nu2) as u32;
    Ok(smoothing_range(omega, SMOOTHING_RESOLUTION)?.powered(sweeps))
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentSummary {
    pub problem: ProblemKind,
    pub n: usize,
    pub seed: u64,
    pub relax: Relaxation,
    pub nu1: usize,
    pub nu2: usize,
    pub coarsening: Coarsening,
    pub levels: Vec<usize>,
    pub acceleration: Acceleration,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bounds: Option<ResolvedBounds>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub optimal: Option<OptimalAcceleration>,
    /// Asymptotic rate the accelerator is expected to reach on `[b1, bN]`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub predicted_rate: Option<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub initial_residual: f64,
    pub final_residual: f64,
    pub relative_residual: f64,
    pub acf: Option<f64>,
    pub seconds: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub summary: ExperimentSummary,
    pub trace: IterationTrace,
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let setup = Setup::new(config)?;
    run_with_setup(config, &setup)
}

/// Runs `config.acceleration` on an existing setup; lets several methods
/// share one hierarchy.
pub fn run_with_setup(config: &ExperimentConfig, setup: &Setup) -> Result<ExperimentOutcome> {
    let stop = config.stop_rule()?;
    let hier = &setup.hierarchy;
    let a = setup.problem.op.to_csr();
    let rhs = &setup.problem.rhs;
    let x0 = &setup.x0;

    let resolved = if config.acceleration.needs_bounds() || config.bounds == BoundSource::Explicit {
        Some(resolve_bounds(config, hier)?)
    } else {
        None
    };
    let optimal = resolved.map(|r| optimal_coefficient(&r.bounds));
    let start = Instant::now();
    let (out, predicted_rate): (SolveOutput, Option<f64>) = match config.acceleration {
        Acceleration::None => (plain_solve(hier, &a, rhs, x0, stop)?, resolved.map(|r| r.bounds.spectral_radius())),
        Acceleration::Nesterov => {
            let opt = optimal.expect("bounds resolved for nesterov");
            (nesterov_solve(hier, &a, rhs, x0, opt.c_star, stop)?, Some(opt.r_star))
        }
        Acceleration::Chebyshev => {
            let bounds = resolved.expect("bounds resolved for chebyshev").bounds;
            let params = ChebyshevParams::new(&bounds)?;
            let rate = chebyshev_asymptotic_rate(&bounds, bounds.bn().into());
            (chebyshev_solve(hier, &a, rhs, x0, &params, stop)?, Some(rate))
        }
        Acceleration::Pcg => (pcg_solve(&a, hier, rhs, x0, stop)?, None),
        Acceleration::Gmres => (gmres_solve(&a, hier, rhs, x0, stop)?, None),
    };
    let seconds = start.elapsed().as_secs_f64();
    let trace = out.trace;
    let initial = trace.initial_residual();
    let summary = ExperimentSummary {
        problem: config.problem,
        n: config.n,
        seed: config.seed,
        relax: config.relax,
        nu1: config.nu1,
        nu2: config.nu2,
        coarsening: config.coarsening(),
        levels: hier.level_sizes(),
        acceleration: config.acceleration,
        bounds: resolved,
        optimal,
        predicted_rate,
        iterations: trace.iterations(),
        converged: trace.converged(),
        initial_residual: initial,
        final_residual: trace.final_residual(),
        relative_residual: if initial > 0.0 { trace.final_residual() / initial } else { 0.0 },
        acf: acf_estimate(&trace, ACF_WINDOW).ok(),
        seconds: Some(seconds),
    };
    Ok(ExperimentOutcome { summary, trace })
}

/// Settings of the damping-factor sweep for V(1,0) Jacobi on Poisson.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DampingSweep {
    pub omega_min: f64,
    pub omega_max: f64,
    pub step: f64,
    pub n: usize,
    pub seed: u64,
    pub tol: f64,
    /// Caps runs that converge slowly or not at all (ω near 1).
    pub max_iter: usize,
}

impl Default for DampingSweep {
    fn default() -> Self {
        Self {
            omega_min: 0.55,
            omega_max: 1.0,
            step: 0.05,
            n: 255,
            seed: DEFAULT_SEED,
            tol: 1e-8,
            max_iter: 300,
        }
    }
}

impl DampingSweep {
    pub fn omegas(&self) -> Result<Vec<f64>> {
        let valid = |w: f64| w > 0.0 && w <= 1.0;
        if !(self.step > 0.0) || !valid(self.omega_min) || !valid(self.omega_max) || self.omega_min > self.omega_max {
            return Err(Error::InvalidArgument(format!(
                "damping range [{}, {}] with step {} must lie in (0, 1]",
                self.omega_min, self.omega_max, self.step
            )));
        }
        let count = ((self.omega_max - self.omega_min) / self.step + 1e-9).floor() as usize + 1;
        Ok((0..count).map(|k| self.omega_min + k as f64 * self.step).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DampingRow {
    pub omega: f64,
    pub b1: f64,
    #[serde(rename = "bN")]
    pub bn: f64,
    pub plain_pred: f64,
    pub nesterov_pred: f64,
    pub plain_meas: f64,
    pub nesterov_meas: f64,
}

/// Per damping factor: smoothing-analysis bounds, predicted plain and
/// Nesterov factors, and the factors measured on V(1,0) cycles.
pub fn damping_sweep(sweep: &DampingSweep) -> Result<Vec<DampingRow>> {
    let omegas = sweep.omegas()?;
    let problem = Problem::build(ProblemKind::Poisson, sweep.n, sweep.seed)?;
    let a = problem.op.to_csr();
    let x0 = random_vector(problem.op.dim(), sweep.seed);
    let stop = StopRule::new(sweep.tol, sweep.max_iter)?;
    omegas
        .into_iter()
        .map(|omega| {
            let range = smoothing_range(omega, SMOOTHING_RESOLUTION)?;
            let bounds = SpectrumBounds::new(range.b1_hat, range.bn_hat)?;
            let opt = optimal_coefficient(&bounds);
            let spec = CycleSpec::new(1, 0, Relaxation::Jacobi { omega }, Coarsening::Rediscretize);
            let hier = MultigridHierarchy::new(&problem, spec)?;
            let plain = plain_solve(&hier, &a, &problem.rhs, &x0, stop)?;
            let nesterov = nesterov_solve(&hier, &a, &problem.rhs, &x0, opt.c_star, stop)?;
            Ok(DampingRow {
                omega,
                b1: bounds.b1(),
                bn: bounds.bn(),
                plain_pred: range.smoothing_factor,
                nesterov_pred: opt.r_star,
                plain_meas: acf_estimate(&plain.trace, ACF_WINDOW)?,
                nesterov_meas: acf_estimate(&nesterov.trace, ACF_WINDOW)?,
            })
        })
        .collect()
}

pub const DAMPING_CSV_HEADER: &str = "omega,b1,bN,plain_pred,nesterov_pred,plain_meas,nesterov_meas";

pub fn write_damping_csv<W: Write>(rows: &[DampingRow], mut out: W) -> io::Result<()> {
    writeln!(out, "{DAMPING_CSV_HEADER}")?;
    for r in rows {
        let fields = [r.omega, r.b1, r.bn, r.plain_pred, r.nesterov_pred, r.plain_meas, r.nesterov_meas];
        let line: Vec<String> = fields.iter().map(|v| format_sig(*v, 9)).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    Ok(())
}
