//! Accelerators that wrap any stationary sweep `x ↦ Bx + g(rhs)`:
//! plain iteration, fixed-momentum Nesterov, RI Chebyshev, and the
//! PCG / GMRES baselines that use one sweep as the preconditioner.

mod krylov;
mod stationary;
mod trace;

pub use krylov::{gmres_solve, pcg_solve};
pub use stationary::{chebyshev_solve, nesterov_solve, plain_solve};
pub use trace::{acf_estimate, IterationTrace, SolveStatus, StopRule, TraceRecord};

use crate::error::{check_len, Result};
use crate::linalg::CsrMatrix;

/// One application of a stationary iteration. Implementations must be
/// affine in `(x, rhs)` and deterministic.
pub trait StationarySweep {
    fn dim(&self) -> usize;

    /// Writes the swept iterate into `out`.
    fn sweep_into(&self, x: &[f64], rhs: &[f64], out: &mut [f64]);

    fn sweep(&self, x: &[f64], rhs: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.sweep_into(x, rhs, &mut out);
        out
    }
}

impl<T: StationarySweep + ?Sized> StationarySweep for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn sweep_into(&self, x: &[f64], rhs: &[f64], out: &mut [f64]) {
        (**self).sweep_into(x, rhs, out)
    }
}

/// `x ↦ diag(d) x + rhs`, the stationary iteration for the diagonal
/// system `(I − diag(d)) x = rhs`. Realizes any real spectrum exactly.
#[derive(Debug, Clone)]
pub struct DiagonalSweep {
    diag: Vec<f64>,
}

impl DiagonalSweep {
    pub fn new(diag: Vec<f64>) -> Self {
        Self { diag }
    }

    /// Evenly spaced eigenvalues from `lo` to `hi` inclusive.
    pub fn linspace(lo: f64, hi: f64, n: usize) -> Self {
        let step = if n > 1 { (hi - lo) / (n - 1) as f64 } else { 0.0 };
        Self::new((0..n).map(|i| lo + step * i as f64).collect())
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.diag
    }

    /// The system matrix `I − diag(d)`.
    pub fn system_matrix(&self) -> CsrMatrix {
        let n = self.diag.len();
        CsrMatrix::new(
            n,
            n,
            (0..=n).collect(),
            (0..n).collect(),
            self.diag.iter().map(|d| 1.0 - d).collect(),
        )
        .expect("diagonal pattern is valid")
    }
}

impl StationarySweep for DiagonalSweep {
    fn dim(&self) -> usize {
        self.diag.len()
    }

    fn sweep_into(&self, x: &[f64], rhs: &[f64], out: &mut [f64]) {
        for i in 0..self.diag.len() {
            out[i] = self.diag[i] * x[i] + rhs[i];
        }
    }
}

/// Result of a solve: final iterate and its residual history.
#[derive(Debug, Clone)]
pub struct SolveOutput {
    pub x: Vec<f64>,
    pub trace: IterationTrace,
}

fn check_system(dim: usize, a: &CsrMatrix, rhs: &[f64], x0: &[f64]) -> Result<()> {
    check_len(dim, a.nrows())?;
    check_len(dim, a.ncols())?;
    check_len(dim, rhs.len())?;
    check_len(dim, x0.len())
}
