//! Full-weighting restriction and bilinear prolongation between a grid
//! and its standard coarsening. Coarse node `(I, J)` sits on fine node
//! `(2I+1, 2J+1)`; `P = 4 Rᵀ`.

use super::stencil::{inside, Grid2D, StencilOperator};
use crate::error::{check_len, Error, Result};
use crate::linalg::CsrMatrix;

const WEIGHT: [f64; 3] = [1.0, 2.0, 1.0];

fn coarse_of(fine: Grid2D) -> Result<Grid2D> {
    fine.coarsen()
        .ok_or_else(|| Error::InvalidArgument(format!("grid with n = {} cannot be coarsened", fine.n())))
}

/// `(1/16)[1,2,1; 2,4,2; 1,2,1]` applied around each coarse node.
pub fn restrict_full_weighting(fine: &[f64], fine_grid: Grid2D) -> Result<Vec<f64>> {
    check_len(fine_grid.len(), fine.len())?;
    let coarse = coarse_of(fine_grid)?;
    let mut out = vec![0.0; coarse.len()];
    restrict_into(fine, fine_grid, &mut out);
    Ok(out)
}

pub(crate) fn restrict_into(fine: &[f64], fine_grid: Grid2D, out: &mut [f64]) {
    let nf = fine_grid.n();
    let nc = (nf - 1) / 2;
    for jc in 0..nc {
        for ic in 0..nc {
            let (fi, fj) = (2 * ic + 1, 2 * jc + 1);
            let mut acc = 0.0;
            for (dj, wj) in WEIGHT.iter().enumerate() {
                let row = (fj + dj - 1) * nf;
                for (di, wi) in WEIGHT.iter().enumerate() {
                    acc += wi * wj * fine[row + fi + di - 1];
                }
            }
            out[jc * nc + ic] = acc / 16.0;
        }
    }
}

/// Bilinear interpolation from `coarse_grid` to its refinement.
pub fn prolong_bilinear(coarse: &[f64], coarse_grid: Grid2D) -> Result<Vec<f64>> {
    check_len(coarse_grid.len(), coarse.len())?;
    let fine = coarse_grid.refine();
    let mut out = vec![0.0; fine.len()];
    prolong_add_into(coarse, coarse_grid, &mut out);
    Ok(out)
}

/// `fine += P coarse`.
pub(crate) fn prolong_add_into(coarse: &[f64], coarse_grid: Grid2D, fine: &mut [f64]) {
    let nc = coarse_grid.n();
    let nf = 2 * nc + 1;
    for jc in 0..nc {
        for ic in 0..nc {
            let v = coarse[jc * nc + ic] / 4.0;
            if v == 0.0 {
                continue;
            }
            let (fi, fj) = (2 * ic + 1, 2 * jc + 1);
            for (dj, wj) in WEIGHT.iter().enumerate() {
                let row = (fj + dj - 1) * nf;
                for (di, wi) in WEIGHT.iter().enumerate() {
                    fine[row + fi + di - 1] += wi * wj * v;
                }
            }
        }
    }
}

/// Full-weighting restriction as a sparse matrix.
pub fn restriction_matrix(fine_grid: Grid2D) -> Result<CsrMatrix> {
    let coarse = coarse_of(fine_grid)?;
    let nf = fine_grid.n() as isize;
    let mut triplets = Vec::with_capacity(9 * coarse.len());
    for jc in 0..coarse.n() {
        for ic in 0..coarse.n() {
            let (fi, fj) = (2 * ic as isize + 1, 2 * jc as isize + 1);
            for dj in -1..=1isize {
                for di in -1..=1isize {
                    if inside(fi + di, fj + dj, nf) {
                        let w = WEIGHT[(di + 1) as usize] * WEIGHT[(dj + 1) as usize] / 16.0;
                        let col = fine_grid.index((fi + di) as usize, (fj + dj) as usize);
                        triplets.push((coarse.index(ic, jc), col, w));
                    }
                }
            }
        }
    }
    CsrMatrix::from_triplets(coarse.len(), fine_grid.len(), triplets)
}

/// Galerkin coarse operator `R A P`.
pub fn galerkin_coarsen(op: &StencilOperator) -> Result<StencilOperator> {
    let fine = op.grid();
    let coarse = coarse_of(fine)?;
    let r = restriction_matrix(fine)?;
    let mut p = r.transpose();
    p.scale(4.0);
    let rap = r.matmul(&op.to_csr())?.matmul(&p)?;
    StencilOperator::from_csr(coarse, &rap)
}
