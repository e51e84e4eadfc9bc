//! Estimates of the extreme eigenvalues `b1`, `bN` of a sweep's iteration
//! matrix: local Fourier analysis of damped Jacobi on the five-point
//! Laplacian, and a power method on arbitrary affine sweeps.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{dot_unchecked, norm2, random_vector};
use crate::solvers::StationarySweep;

/// Fourier symbol of damped Jacobi for the five-point Laplacian,
/// `1 − ω + (ω/2)(cos θ1 + cos θ2)`.
pub fn jacobi_symbol(omega: f64, theta: (f64, f64)) -> f64 {
    1.0 - omega + 0.5 * omega * (theta.0.cos() + theta.1.cos())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymbolRange {
    pub b1_hat: f64,
    #[serde(rename = "bN_hat")]
    pub bn_hat: f64,
    pub smoothing_factor: f64,
}

impl SymbolRange {
    fn from_extremes(b1_hat: f64, bn_hat: f64) -> Self {
        Self {
            b1_hat,
            bn_hat,
            smoothing_factor: b1_hat.abs().max(bn_hat.abs()),
        }
    }

    /// Range of `S^ν` over the same frequencies, for `ν` sweeps per cycle.
    pub fn powered(&self, nu: u32) -> Self {
        let (lo, hi) = (self.b1_hat, self.bn_hat);
        if nu % 2 == 1 {
            return Self::from_extremes(lo.powi(nu as i32), hi.powi(nu as i32));
        }
        let (a, b) = (lo.abs().powi(nu as i32), hi.abs().powi(nu as i32));
        let min = if lo < 0.0 && hi > 0.0 { 0.0 } else { a.min(b) };
        Self::from_extremes(min, a.max(b))
    }
}

pub const MIN_RESOLUTION: usize = 64;

/// Extremes of the Jacobi symbol over the high frequencies
/// `max(θ1, θ2) ≥ π/2`. By symmetry it suffices to sample
/// `[π/2, π] × [0, π]` with `resolution` points per axis, endpoints
/// included.
pub fn smoothing_range(omega: f64, resolution: usize) -> Result<SymbolRange> {
    if resolution < MIN_RESOLUTION {
        return Err(Error::InvalidArgument(format!(
            "smoothing analysis needs resolution >= {MIN_RESOLUTION}, got {resolution}"
        )));
    }
    if !(omega > 0.0 && omega <= 1.0) {
        return Err(Error::InvalidArgument(format!("Jacobi damping must lie in (0, 1], got {omega}")));
    }
    let last = (resolution - 1) as f64;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for a in 0..resolution {
        let t1 = FRAC_PI_2 + FRAC_PI_2 * a as f64 / last;
        for b in 0..resolution {
            let t2 = PI * b as f64 / last;
            let s = jacobi_symbol(omega, (t1, t2));
            lo = lo.min(s);
            hi = hi.max(s);
        }
    }
    Ok(SymbolRange::from_extremes(lo, hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerEstimate {
    /// Signed estimate of the eigenvalue of largest modulus, or its
    /// modulus when `complex_dominant` is set.
    pub dominant: f64,
    /// Estimate at the other end of the spectrum, from the shifted map.
    pub opposite: f64,
    pub shift: f64,
    /// The iterates did not settle on a real direction: the dominant
    /// eigenvalues are likely a complex pair.
    pub complex_dominant: bool,
}

impl PowerEstimate {
    pub fn lower(&self) -> f64 {
        self.dominant.min(self.opposite)
    }

    pub fn upper(&self) -> f64 {
        self.dominant.max(self.opposite)
    }
}

/// A direction counts as converged when the Rayleigh quotient accounts
/// for this fraction of the growth.
const ALIGNMENT: f64 = 1.0 - 1e-3;

pub const MIN_POWER_ITERS: usize = 20;

/// Power method on the error propagator `E v = sweep(v, 0) − sweep(0, 0)`.
///
/// The opposite end of the spectrum comes from the same iteration on
/// `E − μI`, shifted back by `μ`; `shift = None` uses the dominant
/// estimate as `μ`.
pub fn power_extreme_eigs(
    sweep: &dyn StationarySweep,
    iters: usize,
    shift: Option<f64>,
    seed: u64,
) -> Result<PowerEstimate> {
    if iters < MIN_POWER_ITERS {
        return Err(Error::InvalidArgument(format!(
            "power method needs at least {MIN_POWER_ITERS} iterations, got {iters}"
        )));
    }
    let dim = sweep.dim();
    let zero = vec![0.0; dim];
    let offset = sweep.sweep(&zero, &zero);
    let error_map = |v: &[f64], out: &mut [f64]| {
        sweep.sweep_into(v, &zero, out);
        for (o, c) in out.iter_mut().zip(&offset) {
            *o -= c;
        }
    };
    let start = random_vector(dim, seed);

    let (dominant, complex_dominant) = power_iterate(error_map, &start, iters)?;
    let mu = shift.unwrap_or(dominant);
    let shifted = |v: &[f64], out: &mut [f64]| {
        error_map(v, out);
        for (o, x) in out.iter_mut().zip(v) {
            *o -= mu * x;
        }
    };
    let (opposite, _) = power_iterate(shifted, &start, iters)?;
    Ok(PowerEstimate {
        dominant,
        opposite: opposite + mu,
        shift: mu,
        complex_dominant,
    })
}

/// Returns the signed Rayleigh quotient, or the growth factor with the
/// flag set when the direction has not converged.
fn power_iterate<F>(apply: F, start: &[f64], iters: usize) -> Result<(f64, bool)>
where
    F: Fn(&[f64], &mut [f64]),
{
    let norm = norm2(start);
    if norm == 0.0 {
        return Ok((0.0, false));
    }
    let mut v: Vec<f64> = start.iter().map(|x| x / norm).collect();
    let mut w = vec![0.0; v.len()];
    let (mut q, mut growth) = (0.0, 0.0);
    for _ in 0..iters {
        apply(&v, &mut w);
        growth = norm2(&w);
        if growth == 0.0 {
            return Ok((0.0, false));
        }
        if !growth.is_finite() {
            return Err(Error::DivergentMap);
        }
        q = dot_unchecked(&w, &v);
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / growth;
        }
    }
    if q.abs() >= ALIGNMENT * growth {
        Ok((q, false))
    } else {
        Ok((growth, true))
    }
}
