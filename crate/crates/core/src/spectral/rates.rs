//! Convergence factors of the two-term momentum recurrence for a single
//! eigenvalue `b` of the iteration matrix.
//!
//! Each eigenvalue `b` of `B` yields the pair of companion eigenvalues
//! solving `λ² − (1+c)bλ + cb = 0`; the rate is the larger root modulus.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Value of `b` at which the companion quadratic has a double root.
pub fn critical_b(c: f64) -> Result<f64> {
    if c == -1.0 {
        return Err(Error::InvalidArgument("critical_b undefined at c = -1".into()));
    }
    Ok(critical_b_unchecked(c))
}

#[inline]
fn critical_b_unchecked(c: f64) -> f64 {
    4.0 * c / ((1.0 + c) * (1.0 + c))
}

/// The momentum coefficient that minimizes the rate for eigenvalue `b`.
/// Lies in `(-3 + 2√2, 1)` for `b ∈ (-1, 1)`.
pub fn critical_c(b: f64) -> Result<f64> {
    if !(b < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "critical_c requires b < 1, got {b}"
        )));
    }
    Ok(critical_c_unchecked(b))
}

#[inline]
pub(crate) fn critical_c_unchecked(b: f64) -> f64 {
    let s = (1.0 - b).sqrt();
    (1.0 - s) / (1.0 + s)
}

pub(crate) fn check_momentum(c: f64) -> Result<()> {
    if c.abs() < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "momentum coefficient must satisfy |c| < 1, got {c}"
        )))
    }
}

/// Discriminant `(1+c)²b² − 4cb`, evaluated in the factored form
/// `b (1+c)² (b − b_cr)` so that its sign is exact at `b = critical_b(c)`.
#[inline]
fn discriminant(c: f64, b: f64) -> f64 {
    let opc2 = (1.0 + c) * (1.0 + c);
    b * opc2 * (b - critical_b_unchecked(c))
}

/// Whether the companion roots for real `b` form a complex pair.
pub fn has_complex_roots(c: f64, b: f64) -> bool {
    discriminant(c, b) < 0.0
}

/// Rate for a real eigenvalue `b`. Requires `|c| < 1`.
pub fn rate_real(c: f64, b: f64) -> Result<f64> {
    check_momentum(c)?;
    Ok(real_rate(c, b))
}

pub(crate) fn real_rate(c: f64, b: f64) -> f64 {
    if b == 0.0 {
        return 0.0;
    }
    let disc = discriminant(c, b);
    if disc < 0.0 {
        // conjugate pair, |λ|² = cb
        (c * b).sqrt()
    } else {
        0.5 * ((1.0 + c) * b + b.signum() * disc.sqrt()).abs()
    }
}

/// Rate for a complex eigenvalue `b`. Requires `|c| < 1`.
pub fn rate_complex(c: f64, b: Complex64) -> Result<f64> {
    check_momentum(c)?;
    Ok(complex_rate(c, b))
}

pub(crate) fn complex_rate(c: f64, b: Complex64) -> f64 {
    let opc = 1.0 + c;
    // same operation order as `discriminant` so the real axis agrees bitwise
    let disc = b * (opc * opc) * (b - critical_b_unchecked(c));
    let s = disc.sqrt();
    let p = b * opc;
    0.5 * (p + s).norm().max((p - s).norm())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Max root modulus of λ² + pλ + q = 0 by the textbook formula.
    fn quadratic_oracle(p: f64, q: f64) -> f64 {
        let d = p * p - 4.0 * q;
        if d >= 0.0 {
            let (r1, r2) = ((-p + d.sqrt()) / 2.0, (-p - d.sqrt()) / 2.0);
            r1.abs().max(r2.abs())
        } else {
            q.sqrt()
        }
    }

    #[test]
    fn critical_values() {
        assert_eq!(critical_b(0.0).unwrap(), 0.0);
        assert!((critical_b(1.0 / 3.0).unwrap() - 0.75).abs() < 1e-15);
        assert!((critical_b(-1.0 / 3.0).unwrap() + 3.0).abs() < 1e-14);
        assert!(critical_b(-1.0).is_err());

        assert_eq!(critical_c(0.0).unwrap(), 0.0);
        assert!(critical_c(1e-12).unwrap().abs() < 1e-12);
        assert!((critical_c(-1.0).unwrap() - (-3.0 + 2.0 * 2f64.sqrt())).abs() < 1e-15);
        assert!((critical_c(0.75).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!(critical_c(1.0).is_err());
        assert!(critical_c(f64::NAN).is_err());
    }

    #[test]
    fn critical_c_inverts_critical_b() {
        for k in 0..200 {
            let b = -2.9 + 3.85 * k as f64 / 199.0;
            let c = critical_c(b).unwrap();
            assert!((critical_b(c).unwrap() - b).abs() < 1e-12, "b = {b}");
        }
    }

    #[test]
    fn critical_c_is_monotone() {
        let mut prev = f64::NEG_INFINITY;
        for k in 0..1000 {
            let c = critical_c(-0.999 + 1.998 * k as f64 / 999.0).unwrap();
            assert!(c > prev);
            prev = c;
        }
    }

    #[test]
    fn rate_real_examples() {
        assert!((rate_real(0.0, 0.7).unwrap() - 0.7).abs() < 1e-15);
        let b = critical_b(0.5).unwrap();
        assert!((b - 8.0 / 9.0).abs() < 1e-15);
        let r = rate_real(0.5, b).unwrap();
        assert!((r - 2.0 / 3.0).abs() < 1e-15, "{r}");
        assert!((r - 2.0 * 0.5 / 1.5).abs() < 1e-15);
        // λ² + 0.6λ − 0.1 = 0
        let oracle = quadratic_oracle(0.6, -0.1);
        assert!((oracle - 0.735_889_894_354_067_4).abs() < 1e-12);
        assert!((rate_real(0.2, -0.5).unwrap() - oracle).abs() < 1e-14);
        assert_eq!(rate_real(0.3, 0.0).unwrap(), 0.0);
        assert!(rate_real(1.0, 0.5).is_err());
        assert!(rate_real(-1.2, 0.5).is_err());
    }

    #[test]
    fn rate_real_matches_quadratic_formula_on_grid() {
        for i in 0..41 {
            let c = -0.95 + 1.9 * i as f64 / 40.0;
            for j in 0..57 {
                let b = -0.99 + 1.98 * j as f64 / 56.0;
                let oracle = quadratic_oracle(-(1.0 + c) * b, c * b);
                assert!(
                    (rate_real(c, b).unwrap() - oracle).abs() < 1e-9,
                    "c={c} b={b}"
                );
            }
        }
    }

    #[test]
    fn rate_complex_examples() {
        let r = rate_complex(0.0, Complex64::new(0.2, 0.3)).unwrap();
        assert!((r - 0.13f64.sqrt()).abs() < 1e-15);
        assert!(rate_complex(1.0, Complex64::new(0.2, 0.0)).is_err());
    }

    #[test]
    fn discriminant_sign() {
        // complex roots exactly when b, c share a sign and 0 < |b| < |b_cr(c)|
        for i in 0..81 {
            let c = -0.975 + 1.95 * i as f64 / 80.0;
            let bcr = critical_b(c).unwrap();
            for j in 0..97 {
                let b = -2.95 + 3.9 * j as f64 / 96.0;
                let d = (1.0 + c).powi(2) * b * b - 4.0 * c * b;
                if d.abs() < 1e-12 {
                    continue;
                }
                let same_sign = b * c > 0.0;
                let predicted = same_sign && b.abs() < bcr.abs();
                assert_eq!(d < 0.0, predicted, "c={c} b={b}");
                assert_eq!(has_complex_roots(c, b), predicted, "c={c} b={b}");
            }
        }
    }
}
