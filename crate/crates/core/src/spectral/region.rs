use std::io::{self, Write};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::chebyshev::chebyshev_asymptotic_rate;
use super::optimal::{optimal_coefficient, OptimalAcceleration, SpectrumBounds};
use super::rates::complex_rate;
use crate::error::{Error, Result};
use crate::report::format_sig;

/// A rate counts as "valid" when it does not exceed `r*` by more than this.
pub const VALIDITY_TOL: f64 = 1e-12;

/// Rectangular sample grid in the complex plane. Points are
/// `min + i·step` along each axis up to and including `max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionGrid {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub step: f64,
}

impl RegionGrid {
    /// `points` samples per axis over `[−half_width, half_width]²`.
    pub fn square(half_width: f64, points: usize) -> Result<Self> {
        if points < 2 {
            return Err(Error::InvalidArgument("need at least 2 points per axis".into()));
        }
        Ok(Self {
            re_min: -half_width,
            re_max: half_width,
            im_min: -half_width,
            im_max: half_width,
            step: 2.0 * half_width / (points - 1) as f64,
        })
    }

    fn axis_len(min: f64, max: f64, step: f64) -> usize {
        ((max - min) / step + 1e-9).floor() as usize + 1
    }

    pub fn re_points(&self) -> usize {
        Self::axis_len(self.re_min, self.re_max, self.step)
    }

    pub fn im_points(&self) -> usize {
        Self::axis_len(self.im_min, self.im_max, self.step)
    }

    pub fn len(&self) -> usize {
        self.re_points() * self.im_points()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Row-major: imaginary part outer (ascending), real part inner.
    pub fn point(&self, k: usize) -> Complex64 {
        let nre = self.re_points();
        let (row, col) = (k / nre, k % nre);
        Complex64::new(
            self.re_min + col as f64 * self.step,
            self.im_min + row as f64 * self.step,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionPoint {
    pub re: f64,
    pub im: f64,
    pub nesterov_rate: f64,
    pub cheb_rate: f64,
    pub nesterov_valid: bool,
    pub cheb_valid: bool,
}

/// Per-point asymptotic rates of optimal-momentum Nesterov and RI
/// Chebyshev over a complex-plane grid, flagged against `r*`.
#[derive(Debug, Clone, Serialize)]
pub struct RegionMap {
    pub bounds: SpectrumBounds,
    pub optimal: OptimalAcceleration,
    pub grid: RegionGrid,
    pub points: Vec<RegionPoint>,
}

pub fn region_scan(bounds: &SpectrumBounds, grid: &RegionGrid) -> Result<RegionMap> {
    if !(grid.step > 0.0) || !(grid.re_max >= grid.re_min) || !(grid.im_max >= grid.im_min) {
        return Err(Error::InvalidArgument(format!("degenerate region grid {grid:?}")));
    }
    let optimal = optimal_coefficient(bounds);
    let threshold = optimal.r_star + VALIDITY_TOL;
    let points = (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let b = grid.point(k);
            let nesterov_rate = complex_rate(optimal.c_star, b);
            let cheb_rate = chebyshev_asymptotic_rate(bounds, b);
            RegionPoint {
                re: b.re,
                im: b.im,
                nesterov_rate,
                cheb_rate,
                nesterov_valid: nesterov_rate <= threshold,
                cheb_valid: cheb_rate <= threshold,
            }
        })
        .collect();
    Ok(RegionMap {
        bounds: *bounds,
        optimal,
        grid: *grid,
        points,
    })
}

impl RegionMap {
    pub const CSV_HEADER: &'static str = "re,im,nesterov_rate,cheb_rate,nesterov_valid,cheb_valid";

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{}", Self::CSV_HEADER)?;
        for p in &self.points {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                format_sig(p.re, 9),
                format_sig(p.im, 9),
                format_sig(p.nesterov_rate, 9),
                format_sig(p.cheb_rate, 9),
                u8::from(p.nesterov_valid),
                u8::from(p.cheb_valid),
            )?;
        }
        Ok(())
    }

    /// Points valid for Chebyshev but not for Nesterov.
    pub fn cheb_only_count(&self) -> usize {
        self.points
            .iter()
            .filter(|p| p.cheb_valid && !p.nesterov_valid)
            .count()
    }
}
