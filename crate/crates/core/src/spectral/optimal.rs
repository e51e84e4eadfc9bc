use std::fmt;

use serde::Serialize;

use super::rates::{critical_c_unchecked, real_rate};
use crate::error::{Error, Result};

/// Extreme real eigenvalues `b1 ≤ bN` of an iteration matrix.
///
/// `b1` may go below −1 (down to −3): the unaccelerated iteration then
/// diverges but the momentum iteration can still converge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumBounds {
    b1: f64,
    #[serde(rename = "bN")]
    bn: f64,
}

impl SpectrumBounds {
    pub fn new(b1: f64, bn: f64) -> Result<Self> {
        if !(b1.is_finite() && bn.is_finite()) {
            return Err(Error::InvalidBounds(format!("non-finite bounds ({b1}, {bn})")));
        }
        if b1 > bn {
            return Err(Error::InvalidBounds(format!("b1 = {b1} exceeds bN = {bn}")));
        }
        if !(b1 > -3.0) {
            return Err(Error::InvalidBounds(format!("b1 = {b1} must exceed -3")));
        }
        if !(bn < 1.0) {
            return Err(Error::InvalidBounds(format!("bN = {bn} must be below 1")));
        }
        Ok(Self { b1, bn })
    }

    pub fn b1(&self) -> f64 {
        self.b1
    }

    pub fn bn(&self) -> f64 {
        self.bn
    }

    /// `max(|b1|, bN)`, the convergence factor without acceleration.
    pub fn spectral_radius(&self) -> f64 {
        self.b1.abs().max(self.bn.abs())
    }

    /// True when `b1 ≤ −1`, i.e. the plain iteration diverges.
    pub fn is_extended(&self) -> bool {
        self.b1 <= -1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    /// `bN ≥ −3 b1`: the coefficient depends on `bN` only.
    Top,
    Mid,
    /// `bN ≤ −b1 / 3`: the coefficient depends on `b1` only.
    Bot,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Top => "Top",
            Regime::Mid => "Mid",
            Regime::Bot => "Bot",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimalAcceleration {
    pub c_star: f64,
    pub r_star: f64,
    pub regime: Regime,
    /// Complex eigenvalues with modulus up to this radius leave
    /// `c_star` and `r_star` unchanged.
    pub robustness_radius: f64,
    /// Set when `b1 ≤ −1`. The robustness radius is computed by the same
    /// rule but has not been established for this range.
    pub extended: bool,
}

/// Absolute slack on the regime boundaries. The three formulas agree on
/// the boundaries, so inputs like `b1 = −bN/3` that land a rounding error
/// off the line are classified as lying on it.
const BOUNDARY_TOL: f64 = 1e-12;

pub fn regime_classify(bounds: &SpectrumBounds) -> Regime {
    let (b1, bn) = (bounds.b1, bounds.bn);
    if bn >= -3.0 * b1 - BOUNDARY_TOL {
        Regime::Top
    } else if bn <= -b1 / 3.0 + BOUNDARY_TOL {
        Regime::Bot
    } else {
        Regime::Mid
    }
}

/// The eigenvalue whose critical coefficient is optimal for `bounds`.
pub fn optimal_target(bounds: &SpectrumBounds) -> f64 {
    let (b1, bn) = (bounds.b1, bounds.bn);
    match regime_classify(bounds) {
        Regime::Top => bn,
        Regime::Mid => -8.0 * bn * b1 * (b1 + bn) / ((b1 - bn) * (b1 - bn)),
        Regime::Bot => b1,
    }
}

/// Optimal fixed momentum coefficient and the resulting convergence factor.
pub fn optimal_coefficient(bounds: &SpectrumBounds) -> OptimalAcceleration {
    let (b1, bn) = (bounds.b1, bounds.bn);
    let regime = regime_classify(bounds);
    let c_star = critical_c_unchecked(optimal_target(bounds));
    let (r_star, robustness_radius) = match regime {
        Regime::Top => (1.0 - (1.0 - bn).sqrt(), bn / 3.0),
        // the endpoint rates coincide here; callers may assert it
        Regime::Mid => (real_rate(c_star, bn), b1.abs().min(bn.abs())),
        Regime::Bot => ((1.0 - b1).sqrt() - 1.0, -b1 / 3.0),
    };
    OptimalAcceleration {
        c_star,
        r_star,
        regime,
        robustness_radius,
        extended: bounds.is_extended(),
    }
}

/// Asymptotic ratio of plain to accelerated iteration counts,
/// `ln r* / ln ρ(B)` with `ρ(B) = max(|b1|, bN)`.
pub fn acceleration_ratio(bounds: &SpectrumBounds) -> Result<f64> {
    let rho = bounds.spectral_radius();
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::AccelerationRatioUndefined);
    }
    Ok(optimal_coefficient(bounds).r_star.ln() / rho.ln())
}
