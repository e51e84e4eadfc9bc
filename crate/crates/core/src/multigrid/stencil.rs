use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::linalg::CsrMatrix;

/// Uniform grid of `n × n` interior nodes on the unit square with
/// Dirichlet boundary, `h = 1/(n+1)`. Node `(i, j)` is stored at `j·n + i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grid2D {
    n: usize,
}

impl Grid2D {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("grid needs at least one interior node".into()));
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        1.0 / (self.n + 1) as f64
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.n + i
    }

    /// Standard vertex coarsening `n ↦ (n−1)/2`; `None` unless `n` is odd
    /// and at least 3.
    pub fn coarsen(&self) -> Option<Grid2D> {
        (self.n >= 3 && self.n % 2 == 1).then(|| Grid2D { n: (self.n - 1) / 2 })
    }

    /// The grid that coarsens to this one.
    pub fn refine(&self) -> Grid2D {
        Grid2D { n: 2 * self.n + 1 }
    }
}

/// Position of offset `(di, dj)` in a 3×3 stencil.
#[inline]
pub fn stencil_slot(di: isize, dj: isize) -> usize {
    ((dj + 1) * 3 + (di + 1)) as usize
}

const CENTER: usize = 4;

/// Nine-point stencil per node. Entries that would couple to nodes
/// outside the grid are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct StencilOperator {
    grid: Grid2D,
    stencils: Vec<[f64; 9]>,
}

impl StencilOperator {
    /// Builds an operator with the same interior stencil at every node;
    /// couplings across the boundary are dropped.
    pub fn constant(grid: Grid2D, stencil: [f64; 9]) -> Self {
        let mut stencils = vec![stencil; grid.len()];
        let n = grid.n() as isize;
        for j in 0..n {
            for i in 0..n {
                let s = &mut stencils[grid.index(i as usize, j as usize)];
                for dj in -1..=1 {
                    for di in -1..=1 {
                        if !inside(i + di, j + dj, n) {
                            s[stencil_slot(di, dj)] = 0.0;
                        }
                    }
                }
            }
        }
        Self { grid, stencils }
    }

    pub(crate) fn from_stencils(grid: Grid2D, stencils: Vec<[f64; 9]>) -> Self {
        debug_assert_eq!(stencils.len(), grid.len());
        Self { grid, stencils }
    }

    pub fn grid(&self) -> Grid2D {
        self.grid
    }

    pub fn dim(&self) -> usize {
        self.grid.len()
    }

    pub fn stencil(&self, i: usize, j: usize) -> &[f64; 9] {
        &self.stencils[self.grid.index(i, j)]
    }

    pub fn stencils(&self) -> &[[f64; 9]] {
        &self.stencils
    }

    pub fn diagonal(&self) -> Vec<f64> {
        self.stencils.iter().map(|s| s[CENTER]).collect()
    }

    /// Index of the first node with a zero diagonal, if any.
    pub fn zero_diagonal(&self) -> Option<usize> {
        self.stencils.iter().position(|s| s[CENTER] == 0.0)
    }

    /// `y = A x`.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.dim(), x.len())?;
        let mut y = vec![0.0; x.len()];
        self.apply_into(x, &mut y);
        Ok(y)
    }

    pub(crate) fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        let n = self.grid.n();
        for j in 0..n {
            for i in 0..n {
                let k = j * n + i;
                y[k] = self.row_dot(i, j, x);
            }
        }
    }

    /// `r = rhs − A x`.
    pub(crate) fn residual_into(&self, x: &[f64], rhs: &[f64], r: &mut [f64]) {
        let n = self.grid.n();
        for j in 0..n {
            for i in 0..n {
                let k = j * n + i;
                r[k] = rhs[k] - self.row_dot(i, j, x);
            }
        }
    }

    /// `Σ_{(di,dj)} s[di,dj] x[i+di, j+dj]` over in-grid neighbours.
    #[inline]
    pub(crate) fn row_dot(&self, i: usize, j: usize, x: &[f64]) -> f64 {
        let n = self.grid.n();
        let s = &self.stencils[j * n + i];
        let (i0, i1) = (i.saturating_sub(1), (i + 1).min(n - 1));
        let (j0, j1) = (j.saturating_sub(1), (j + 1).min(n - 1));
        let mut acc = 0.0;
        for jj in j0..=j1 {
            let row = jj * n;
            let base = (jj + 1 - j) * 3;
            for ii in i0..=i1 {
                acc += s[base + ii + 1 - i] * x[row + ii];
            }
        }
        acc
    }

    /// Off-diagonal part of `row_dot`.
    #[inline]
    pub(crate) fn off_diagonal_dot(&self, i: usize, j: usize, x: &[f64]) -> f64 {
        let k = self.grid.index(i, j);
        self.row_dot(i, j, x) - self.stencils[k][CENTER] * x[k]
    }

    pub fn to_csr(&self) -> CsrMatrix {
        let n = self.grid.n() as isize;
        let mut triplets = Vec::with_capacity(9 * self.dim());
        for j in 0..n {
            for i in 0..n {
                let row = self.grid.index(i as usize, j as usize);
                let s = &self.stencils[row];
                for dj in -1..=1 {
                    for di in -1..=1 {
                        let v = s[stencil_slot(di, dj)];
                        if v != 0.0 && inside(i + di, j + dj, n) {
                            let col = self.grid.index((i + di) as usize, (j + dj) as usize);
                            triplets.push((row, col, v));
                        }
                    }
                }
            }
        }
        CsrMatrix::from_triplets(self.dim(), self.dim(), triplets)
            .expect("stencil columns lie inside the grid")
    }

    /// Reads a matrix whose couplings stay within each node's 3×3
    /// neighbourhood back into stencil form.
    pub fn from_csr(grid: Grid2D, a: &CsrMatrix) -> Result<Self> {
        check_len(grid.len(), a.nrows())?;
        check_len(grid.len(), a.ncols())?;
        let n = grid.n() as isize;
        let mut stencils = vec![[0.0; 9]; grid.len()];
        for (row, s) in stencils.iter_mut().enumerate() {
            let (i, j) = ((row as isize) % n, (row as isize) / n);
            for (col, v) in a.row(row) {
                let (ci, cj) = ((col as isize) % n, (col as isize) / n);
                let (di, dj) = (ci - i, cj - j);
                if di.abs() > 1 || dj.abs() > 1 {
                    return Err(Error::InvalidArgument(format!(
                        "entry ({row}, {col}) is outside the nine-point neighbourhood"
                    )));
                }
                s[stencil_slot(di, dj)] += v;
            }
        }
        Ok(Self { grid, stencils })
    }
}

#[inline]
pub(crate) fn inside(i: isize, j: isize, n: isize) -> bool {
    (0..n).contains(&i) && (0..n).contains(&j)
}
