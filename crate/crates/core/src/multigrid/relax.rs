use std::fmt;

use serde::{Deserialize, Serialize};

use super::stencil::StencilOperator;
use crate::error::{check_len, Error, Result};

/// Pointwise smoother. Red points are those with `i + j` even.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Relaxation {
    /// `x + ω D⁻¹ (rhs − A x)`.
    Jacobi { omega: f64 },
    #[serde(alias = "rb")]
    RedBlack,
    /// Gauss–Seidel in row-major order.
    #[serde(alias = "lexicographic")]
    Lex,
}

impl Relaxation {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Jacobi { omega } if !(omega > 0.0 && omega <= 1.0) => Err(Error::InvalidArgument(
                format!("Jacobi damping must lie in (0, 1], got {omega}"),
            )),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Relaxation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Jacobi { omega } => write!(f, "jacobi(omega={omega})"),
            Self::RedBlack => f.write_str("red-black"),
            Self::Lex => f.write_str("lex"),
        }
    }
}

/// One relaxation sweep on `A x = rhs`.
pub fn relax_sweep(kind: Relaxation, op: &StencilOperator, x: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    kind.validate()?;
    check_len(op.dim(), x.len())?;
    check_len(op.dim(), rhs.len())?;
    if let Some(k) = op.zero_diagonal() {
        return Err(Error::ZeroDiagonal(k));
    }
    let mut out = x.to_vec();
    let mut scratch = vec![0.0; x.len()];
    relax_in_place(kind, op, &mut out, rhs, &mut scratch);
    Ok(out)
}

/// In-place sweep; `scratch` must have the operator's dimension and is
/// used only by Jacobi. The diagonal is assumed nonzero.
pub(crate) fn relax_in_place(
    kind: Relaxation,
    op: &StencilOperator,
    x: &mut [f64],
    rhs: &[f64],
    scratch: &mut [f64],
) {
    let n = op.grid().n();
    let stencils = op.stencils();
    match kind {
        Relaxation::Jacobi { omega } => {
            op.residual_into(x, rhs, scratch);
            for ((xi, ri), s) in x.iter_mut().zip(scratch.iter()).zip(stencils) {
                *xi += omega * ri / s[4];
            }
        }
        Relaxation::RedBlack => {
            for color in 0..2 {
                for j in 0..n {
                    for i in ((j + color) % 2..n).step_by(2) {
                        gauss_seidel_point(op, i, j, x, rhs);
                    }
                }
            }
        }
        Relaxation::Lex => {
            for j in 0..n {
                for i in 0..n {
                    gauss_seidel_point(op, i, j, x, rhs);
                }
            }
        }
    }
}

#[inline]
fn gauss_seidel_point(op: &StencilOperator, i: usize, j: usize, x: &mut [f64], rhs: &[f64]) {
    let k = op.grid().index(i, j);
    let off = op.off_diagonal_dot(i, j, x);
    x[k] = (rhs[k] - off) / op.stencils()[k][4];
}
