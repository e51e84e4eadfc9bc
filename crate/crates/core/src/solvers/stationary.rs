use super::trace::{Monitor, StopRule};
use super::{check_system, SolveOutput, StationarySweep};
use crate::error::Result;
use crate::linalg::CsrMatrix;
use crate::spectral::ChebyshevParams;

/// Unaccelerated iteration `x_{k+1} = sweep(x_k)`.
pub fn plain_solve(
    op: &dyn StationarySweep,
    a: &CsrMatrix,
    rhs: &[f64],
    x0: &[f64],
    stop: StopRule,
) -> Result<SolveOutput> {
    check_system(op.dim(), a, rhs, x0)?;
    let mut mon = Monitor::new(a, rhs, stop);
    let mut x = x0.to_vec();
    let mut next = vec![0.0; x.len()];
    if !mon.record(&x)? {
        loop {
            op.sweep_into(&x, rhs, &mut next);
            std::mem::swap(&mut x, &mut next);
            if mon.record(&x)? {
                break;
            }
        }
    }
    Ok(SolveOutput { x, trace: mon.finish() })
}

/// Fixed-momentum iteration `x_{k+1} = sweep((1+c) x_k − c x_{k−1})`.
///
/// The first step is a plain sweep (equivalently `x_{−1} = x_0`).
pub fn nesterov_solve(
    op: &dyn StationarySweep,
    a: &CsrMatrix,
    rhs: &[f64],
    x0: &[f64],
    c: f64,
    stop: StopRule,
) -> Result<SolveOutput> {
    crate::spectral::check_momentum(c)?;
    check_system(op.dim(), a, rhs, x0)?;
    let n = x0.len();
    let mut mon = Monitor::new(a, rhs, stop);
    let mut prev = x0.to_vec();
    if mon.record(&prev)? {
        return Ok(SolveOutput { x: prev, trace: mon.finish() });
    }
    let mut x = op.sweep(&prev, rhs);
    let mut y = vec![0.0; n];
    if !mon.record(&x)? {
        loop {
            for i in 0..n {
                y[i] = (1.0 + c) * x[i] - c * prev[i];
            }
            // prev takes the new iterate, then swaps into place
            op.sweep_into(&y, rhs, &mut prev);
            std::mem::swap(&mut x, &mut prev);
            if mon.record(&x)? {
                break;
            }
        }
    }
    Ok(SolveOutput { x, trace: mon.finish() })
}

/// RI Chebyshev semi-iteration:
/// `x_1 = γ sweep(x_0) + (1−γ) x_0`,
/// `x_{k+1} = β_{k+1} {γ sweep(x_k) + (1−γ) x_k} + (1 − β_{k+1}) x_{k−1}`.
pub fn chebyshev_solve(
    op: &dyn StationarySweep,
    a: &CsrMatrix,
    rhs: &[f64],
    x0: &[f64],
    params: &ChebyshevParams,
    stop: StopRule,
) -> Result<SolveOutput> {
    check_system(op.dim(), a, rhs, x0)?;
    let n = x0.len();
    let gamma = params.gamma;
    let mut betas = params.betas().skip(1);
    let mut mon = Monitor::new(a, rhs, stop);
    let mut prev = x0.to_vec();
    if mon.record(&prev)? {
        return Ok(SolveOutput { x: prev, trace: mon.finish() });
    }
    let mut swept = op.sweep(&prev, rhs);
    let mut x: Vec<f64> = swept
        .iter()
        .zip(&prev)
        .map(|(s, p)| gamma * s + (1.0 - gamma) * p)
        .collect();
    if !mon.record(&x)? {
        loop {
            let beta = betas.next().expect("beta sequence is infinite");
            op.sweep_into(&x, rhs, &mut swept);
            for i in 0..n {
                let extrapolated = gamma * swept[i] + (1.0 - gamma) * x[i];
                prev[i] = beta * extrapolated + (1.0 - beta) * prev[i];
            }
            std::mem::swap(&mut x, &mut prev);
            if mon.record(&x)? {
                break;
            }
        }
    }
    Ok(SolveOutput { x, trace: mon.finish() })
}
