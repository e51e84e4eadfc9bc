//! Chebyshev semi-iteration driven only by the extreme real eigenvalues
//! ("restricted information" Chebyshev).

use num_complex::Complex64;
use serde::Serialize;

use super::optimal::SpectrumBounds;
use crate::error::{Error, Result};

/// Extrapolation factor and interval half-width of the Chebyshev iteration.
///
/// The extrapolated iteration `γB + (1 − γ)I` maps `[b1, bN]` onto
/// `[−σ, σ]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChebyshevParams {
    pub gamma: f64,
    pub sigma: f64,
}

impl ChebyshevParams {
    /// Requires `b1 > −1`.
    pub fn new(bounds: &SpectrumBounds) -> Result<Self> {
        let (b1, bn) = (bounds.b1(), bounds.bn());
        if !(b1 > -1.0) {
            return Err(Error::InvalidBounds(format!(
                "Chebyshev parameters need b1 > -1, got {b1}"
            )));
        }
        let denom = 2.0 - b1 - bn;
        Ok(Self {
            gamma: 2.0 / denom,
            sigma: (bn - b1) / denom,
        })
    }

    /// `β_1, β_2, β_3, …` with `β_1 = 1`, `β_2 = (1 − σ²/2)⁻¹` and
    /// `β_{k+1} = (1 − σ²β_k/4)⁻¹`.
    pub fn betas(&self) -> BetaSequence {
        BetaSequence {
            sigma2: self.sigma * self.sigma,
            index: 0,
            prev: 1.0,
        }
    }

    /// Fixed point of the β recurrence, `2 / (1 + √(1 − σ²))`.
    pub fn beta_limit(&self) -> f64 {
        2.0 / (1.0 + (1.0 - self.sigma * self.sigma).sqrt())
    }

    /// Eigenvalue of the extrapolated iteration for eigenvalue `b` of `B`.
    pub fn extrapolate(&self, b: Complex64) -> Complex64 {
        b * self.gamma + (1.0 - self.gamma)
    }
}

#[derive(Debug, Clone)]
pub struct BetaSequence {
    sigma2: f64,
    index: usize,
    prev: f64,
}

impl Iterator for BetaSequence {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        self.index += 1;
        let beta = match self.index {
            1 => 1.0,
            2 => 1.0 / (1.0 - 0.5 * self.sigma2),
            _ => 1.0 / (1.0 - 0.25 * self.sigma2 * self.prev),
        };
        self.prev = beta;
        Some(beta)
    }
}

/// Asymptotic convergence factor of RI Chebyshev for an eigenvalue `b`,
/// which may lie outside `[b1, bN]` or off the real axis.
pub fn chebyshev_asymptotic_rate(bounds: &SpectrumBounds, b: Complex64) -> f64 {
    let (b1, bn) = (bounds.b1(), bounds.bn());
    let width = bn - b1;
    if width <= f64::EPSILON * (b1.abs() + bn.abs()).max(1.0) {
        // σ = 0: a single extrapolation step, repeated
        let gamma = 1.0 / (1.0 - b1);
        return (b * gamma + (1.0 - gamma)).norm();
    }
    let t = (b * 2.0 - b1 - bn) / width;
    let t1 = (2.0 - b1 - bn) / width;
    let s = (t * t - 1.0).sqrt();
    // exterior branch of the inverse Joukowski map: modulus ≥ 1
    let numerator = (t + s).norm().max((t - s).norm());
    numerator / (t1 + (t1 * t1 - 1.0).sqrt())
}
