//! Krylov baselines. The preconditioner is one sweep started from zero,
//! `M⁻¹ r := sweep(0, r)`, which is linear in `r`.

use super::trace::{Monitor, StopRule};
use super::{check_system, SolveOutput, StationarySweep};
use crate::error::{Error, Result};
use crate::linalg::{axpy_in_place, dot_unchecked, norm2, CsrMatrix};

struct Preconditioner<'a> {
    sweep: &'a dyn StationarySweep,
    zero: Vec<f64>,
}

impl<'a> Preconditioner<'a> {
    fn new(sweep: &'a dyn StationarySweep) -> Self {
        Self {
            sweep,
            zero: vec![0.0; sweep.dim()],
        }
    }

    fn apply(&self, r: &[f64], z: &mut [f64]) {
        self.sweep.sweep_into(&self.zero, r, z);
    }
}

/// Preconditioned conjugate gradients. `A` and the preconditioner must
/// be symmetric positive definite.
pub fn pcg_solve(
    a: &CsrMatrix,
    precond: &dyn StationarySweep,
    rhs: &[f64],
    x0: &[f64],
    stop: StopRule,
) -> Result<SolveOutput> {
    check_system(precond.dim(), a, rhs, x0)?;
    let n = x0.len();
    let m = Preconditioner::new(precond);
    let mut mon = Monitor::new(a, rhs, stop);
    let mut x = x0.to_vec();
    if mon.record(&x)? {
        return Ok(SolveOutput { x, trace: mon.finish() });
    }
    let mut r = mon.residual().to_vec();
    let mut z = vec![0.0; n];
    m.apply(&r, &mut z);
    let mut p = z.clone();
    let mut rz = dot_unchecked(&r, &z);
    let mut ap = vec![0.0; n];
    loop {
        a.spmv_into(&p, &mut ap);
        let curvature = dot_unchecked(&p, &ap);
        if !(curvature > 0.0) {
            return Err(Error::Indefinite(curvature));
        }
        let alpha = rz / curvature;
        axpy_in_place(alpha, &p, &mut x);
        axpy_in_place(-alpha, &ap, &mut r);
        if mon.record(&x)? {
            break;
        }
        m.apply(&r, &mut z);
        let rz_next = dot_unchecked(&r, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        for (pi, zi) in p.iter_mut().zip(&z) {
            *pi = zi + beta * *pi;
        }
    }
    Ok(SolveOutput { x, trace: mon.finish() })
}

/// Right-preconditioned GMRES without restart: modified Gram–Schmidt
/// Arnoldi, Givens rotations for the least-squares problem.
///
/// The preconditioned directions `Z = M⁻¹V` are kept so the iterate can be
/// formed every step without extra preconditioner applications.
pub fn gmres_solve(
    a: &CsrMatrix,
    precond: &dyn StationarySweep,
    rhs: &[f64],
    x0: &[f64],
    stop: StopRule,
) -> Result<SolveOutput> {
    check_system(precond.dim(), a, rhs, x0)?;
    let n = x0.len();
    let m = Preconditioner::new(precond);
    let mut mon = Monitor::new(a, rhs, stop);
    let mut x = x0.to_vec();
    if mon.record(&x)? {
        return Ok(SolveOutput { x, trace: mon.finish() });
    }
    let beta = norm2(mon.residual());
    let mut basis: Vec<Vec<f64>> = vec![mon.residual().iter().map(|v| v / beta).collect()];
    let mut directions: Vec<Vec<f64>> = Vec::new();
    // upper-triangular factor, column by column
    let mut r_cols: Vec<Vec<f64>> = Vec::new();
    let mut rotations: Vec<(f64, f64)> = Vec::new();
    let mut g = vec![beta];
    let mut w = vec![0.0; n];

    for j in 0.. {
        let mut z = vec![0.0; n];
        m.apply(&basis[j], &mut z);
        a.spmv_into(&z, &mut w);
        directions.push(z);

        let mut h = vec![0.0; j + 2];
        for (i, v) in basis.iter().enumerate() {
            h[i] = dot_unchecked(&w, v);
            axpy_in_place(-h[i], v, &mut w);
        }
        let subdiag = norm2(&w);
        h[j + 1] = subdiag;

        for (i, &(c, s)) in rotations.iter().enumerate() {
            let (hi, hn) = (h[i], h[i + 1]);
            h[i] = c * hi + s * hn;
            h[i + 1] = -s * hi + c * hn;
        }
        let d = h[j].hypot(h[j + 1]);
        let (c, s) = if d == 0.0 { (1.0, 0.0) } else { (h[j] / d, h[j + 1] / d) };
        h[j] = d;
        h.truncate(j + 1);
        rotations.push((c, s));
        g.push(-s * g[j]);
        g[j] *= c;
        r_cols.push(h);

        let y = back_substitute(&r_cols, &g[..=j]);
        x.copy_from_slice(x0);
        for (yi, zi) in y.iter().zip(&directions) {
            axpy_in_place(*yi, zi, &mut x);
        }
        if mon.record(&x)? {
            break;
        }
        if subdiag <= f64::EPSILON * beta {
            // the Krylov space is invariant: x is the exact solution
            mon.mark_converged();
            break;
        }
        basis.push(w.iter().map(|v| v / subdiag).collect());
    }
    Ok(SolveOutput { x, trace: mon.finish() })
}

/// Solves `R y = g` for the upper-triangular `R` stored by columns.
fn back_substitute(r_cols: &[Vec<f64>], g: &[f64]) -> Vec<f64> {
    let k = g.len();
    let mut y = g.to_vec();
    for i in (0..k).rev() {
        for j in i + 1..k {
            y[i] -= r_cols[j][i] * y[j];
        }
        y[i] /= r_cols[i][i];
    }
    y
}
