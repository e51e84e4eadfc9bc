//! Brute-force cross-checks for the closed-form rates. Neither oracle
//! evaluates a rate formula; both measure growth of an actual iteration.

use num_complex::Complex64;

use super::chebyshev::ChebyshevParams;
use super::rates::check_momentum;
use crate::error::{Error, Result};
use crate::linalg::{spectral_radius_estimate, DenseMatrix, GrowthEstimator};

/// Spectral radius of the momentum companion matrix
/// `Γ = [[(1+c)B, −cB], [I, 0]]`, estimated by norm growth.
///
/// `B` is assembled block-diagonally from `spectrum`: a real entry becomes a
/// 1×1 block, an entry `a + jβ` with `β ≠ 0` becomes the rotation block
/// `[[a, −β], [β, a]]` and so stands for the conjugate pair `a ± jβ`.
pub fn companion_rate_oracle(c: f64, spectrum: &[Complex64]) -> Result<f64> {
    companion_rate_oracle_with(c, spectrum, &GrowthEstimator::default())
}

pub fn companion_rate_oracle_with(
    c: f64,
    spectrum: &[Complex64],
    estimator: &GrowthEstimator,
) -> Result<f64> {
    check_momentum(c)?;
    if spectrum.iter().any(|b| !(b.re.is_finite() && b.im.is_finite())) {
        return Err(Error::InvalidArgument("spectrum must be finite".into()));
    }
    let b = block_matrix(spectrum);
    let n = b.rows();
    let mut gamma = DenseMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let bij = b.get(i, j);
            gamma.set(i, j, (1.0 + c) * bij);
            gamma.set(i, n + j, -c * bij);
        }
        gamma.set(n + i, i, 1.0);
    }
    spectral_radius_estimate(|v, w| gamma.matvec_into(v, w), 2 * n, estimator)
}

fn block_matrix(spectrum: &[Complex64]) -> DenseMatrix {
    let n: usize = spectrum.iter().map(|b| if b.im == 0.0 { 1 } else { 2 }).sum();
    let mut m = DenseMatrix::zeros(n, n);
    let mut k = 0;
    for b in spectrum {
        if b.im == 0.0 {
            m.set(k, k, b.re);
            k += 1;
        } else {
            m.set(k, k, b.re);
            m.set(k, k + 1, -b.im);
            m.set(k + 1, k, b.im);
            m.set(k + 1, k + 1, b.re);
            k += 2;
        }
    }
    m
}

/// Acceleration scheme applied to a scalar error recurrence.
#[derive(Debug, Clone, Copy)]
pub enum ScalarScheme {
    Nesterov { c: f64 },
    Chebyshev(ChebyshevParams),
}

/// Empirical convergence factor of `scheme` on the scalar problem whose
/// iteration "matrix" is `b`: runs the error recurrence from `e_0 = 1`
/// and returns the geometric mean of `|e_k / e_{k−1}|` over the last
/// quarter of `iters` steps.
pub fn scalar_recurrence_rate_oracle(scheme: &ScalarScheme, b: Complex64, iters: usize) -> Result<f64> {
    if iters < 100 {
        return Err(Error::InvalidArgument(format!(
            "need at least 100 iterations, got {iters}"
        )));
    }
    if let ScalarScheme::Nesterov { c } = scheme {
        check_momentum(*c)?;
    }
    let one = Complex64::new(1.0, 0.0);
    let mut prev = one;
    let mut betas = match scheme {
        ScalarScheme::Chebyshev(p) => Some(p.betas().skip(1)),
        ScalarScheme::Nesterov { .. } => None,
    };
    // first step: one plain (or extrapolated) sweep
    let mut cur = match scheme {
        ScalarScheme::Nesterov { .. } => b,
        ScalarScheme::Chebyshev(p) => p.extrapolate(b),
    };
    let mut log_ratios = Vec::with_capacity(iters);
    log_ratios.push(cur.norm().ln());
    for _ in 1..iters {
        let next = match scheme {
            ScalarScheme::Nesterov { c } => b * (cur * (1.0 + c) - prev * *c),
            ScalarScheme::Chebyshev(p) => {
                let beta = betas.as_mut().and_then(Iterator::next).unwrap_or(1.0);
                p.extrapolate(b) * cur * beta + prev * (1.0 - beta)
            }
        };
        let (m_cur, m_next) = (cur.norm(), next.norm());
        if !(m_next.is_finite() && m_cur.is_finite()) {
            return Err(Error::DivergentMap);
        }
        if m_next == 0.0 || m_cur == 0.0 {
            return Ok(0.0);
        }
        log_ratios.push((m_next / m_cur).ln());
        // rescale the pair together; ratios are unaffected
        prev = cur / m_next;
        cur = next / m_next;
    }
    let window = &log_ratios[iters - iters / 4..];
    Ok((window.iter().sum::<f64>() / window.len() as f64).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{optimal_coefficient, SpectrumBounds};

    fn real(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn companion_without_momentum_is_plain_iteration() {
        let r = companion_rate_oracle(0.0, &[real(0.5), real(-0.3)]).unwrap();
        assert!((r - 0.5).abs() < 1e-3, "{r}");
    }

    #[test]
    fn companion_matches_closed_form_top() {
        let bounds = SpectrumBounds::new(-0.3, 0.9).unwrap();
        let c = optimal_coefficient(&bounds).c_star;
        let r = companion_rate_oracle(c, &[real(-0.3), real(0.9)]).unwrap();
        assert!((r - 0.683_77).abs() < 1e-3, "{r}");
        // complex pair of modulus 0.25 sits inside the robustness disk
        let pair = Complex64::from_polar(0.25, 2.5);
        let r = companion_rate_oracle(c, &[real(-0.3), real(0.9), pair]).unwrap();
        assert!(r <= 0.683_772 + 1e-3, "{r}");
    }

    #[test]
    fn companion_rejects_bad_input() {
        assert!(companion_rate_oracle(1.0, &[real(0.5)]).is_err());
        assert!(companion_rate_oracle(0.2, &[real(f64::NAN)]).is_err());
    }

    #[test]
    fn block_matrix_realizes_pairs() {
        let m = block_matrix(&[real(0.1), Complex64::new(0.2, 0.3)]);
        assert_eq!(m.rows(), 3);
        assert_eq!(m.get(1, 2), -0.3);
        assert_eq!(m.get(2, 1), 0.3);
    }

    #[test]
    fn scalar_recurrence_examples() {
        let r = scalar_recurrence_rate_oracle(&ScalarScheme::Nesterov { c: 0.0 }, real(0.7), 400).unwrap();
        assert!((r - 0.7).abs() < 1e-3);

        let c = optimal_coefficient(&SpectrumBounds::new(-0.3, 0.9).unwrap()).c_star;
        let r = scalar_recurrence_rate_oracle(&ScalarScheme::Nesterov { c }, real(0.9), 2000).unwrap();
        assert!((r - (1.0 - 0.1f64.sqrt())).abs() < 1e-3, "{r}");

        let p = ChebyshevParams::new(&SpectrumBounds::new(-0.6, 0.6).unwrap()).unwrap();
        let r = scalar_recurrence_rate_oracle(&ScalarScheme::Chebyshev(p), real(0.6), 2000).unwrap();
        assert!((r - 1.0 / 3.0).abs() < 1e-2, "{r}");

        assert!(scalar_recurrence_rate_oracle(&ScalarScheme::Nesterov { c: 0.0 }, real(0.7), 50).is_err());
    }

    #[test]
    fn scalar_recurrence_survives_divergent_rates() {
        let r = scalar_recurrence_rate_oracle(&ScalarScheme::Nesterov { c: 0.0 }, real(-2.0), 2000).unwrap();
        assert!((r - 2.0).abs() < 1e-9);
    }
}
