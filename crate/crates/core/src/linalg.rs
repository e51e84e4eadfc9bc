//! Small dense/sparse kernels and a norm-growth spectral radius estimator.
//!
//! Vectors are plain `[f64]` slices. The checked free functions (`dot`,
//! `norm2`, `axpy`, `spmv`) validate lengths; the solvers call the unchecked
//! `*_into` variants in their inner loops after validating once up front.

use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::error::{check_len, Error, Result};

/// Seed used by every oracle that does not take one explicitly.
pub const DEFAULT_SEED: u64 = 0x5eed_1234_abcd_0001;

pub fn dot(x: &[f64], y: &[f64]) -> Result<f64> {
    check_len(x.len(), y.len())?;
    Ok(dot_unchecked(x, y))
}

pub fn norm2(x: &[f64]) -> f64 {
    dot_unchecked(x, x).sqrt()
}

/// Returns `a * x + y`.
pub fn axpy(a: f64, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
    check_len(x.len(), y.len())?;
    Ok(x.iter().zip(y).map(|(xi, yi)| a * xi + yi).collect())
}

#[inline]
pub(crate) fn dot_unchecked(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// `y += a * x`
#[inline]
pub(crate) fn axpy_in_place(a: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

#[inline]
pub(crate) fn scale_in_place(a: f64, x: &mut [f64]) {
    for xi in x {
        *xi *= a;
    }
}

/// Uniform(-1, 1) entries from a SplitMix64 stream.
pub fn random_vector(dim: usize, seed: u64) -> Vec<f64> {
    let mut rng = SplitMix64::seed_from_u64(seed);
    (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// Compressed sparse row matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    pub fn new(
        nrows: usize,
        ncols: usize,
        row_offsets: Vec<usize>,
        col_indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        check_len(nrows + 1, row_offsets.len())?;
        check_len(col_indices.len(), values.len())?;
        if row_offsets[0] != 0 || row_offsets[nrows] != values.len() {
            return Err(Error::InvalidArgument(
                "row offsets must start at 0 and end at nnz".into(),
            ));
        }
        for i in 0..nrows {
            let (start, end) = (row_offsets[i], row_offsets[i + 1]);
            if end < start {
                return Err(Error::InvalidArgument(format!(
                    "row offsets decrease at row {i}"
                )));
            }
            let row = &col_indices[start..end];
            if let Some(&j) = row.iter().find(|&&j| j >= ncols) {
                return Err(Error::InvalidArgument(format!(
                    "column index {j} out of range in row {i}"
                )));
            }
            let mut sorted = row.to_vec();
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidArgument(format!(
                    "duplicate column in row {i}"
                )));
            }
        }
        Ok(Self {
            nrows,
            ncols,
            row_offsets,
            col_indices,
            values,
        })
    }

    /// Assembles from `(row, col, value)` triplets, summing duplicates.
    /// Columns within a row come out sorted.
    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); nrows];
        for (i, j, v) in triplets {
            if i >= nrows || j >= ncols {
                return Err(Error::InvalidArgument(format!(
                    "triplet ({i}, {j}) outside {nrows}x{ncols}"
                )));
            }
            rows[i].push((j, v));
        }
        let mut row_offsets = Vec::with_capacity(nrows + 1);
        let mut col_indices = Vec::new();
        let mut values = Vec::new();
        row_offsets.push(0);
        for mut row in rows {
            row.sort_by_key(|&(j, _)| j);
            for (j, v) in row {
                if col_indices.len() > *row_offsets.last().unwrap()
                    && *col_indices.last().unwrap() == j
                {
                    *values.last_mut().unwrap() += v;
                } else {
                    col_indices.push(j);
                    values.push(v);
                }
            }
            row_offsets.push(values.len());
        }
        Ok(Self {
            nrows,
            ncols,
            row_offsets,
            col_indices,
            values,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            nrows: n,
            ncols: n,
            row_offsets: (0..=n).collect(),
            col_indices: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            row_offsets: vec![0; nrows + 1],
            col_indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn from_dense(m: &DenseMatrix) -> Self {
        let triplets = (0..m.rows())
            .flat_map(|i| (0..m.cols()).map(move |j| (i, j)))
            .filter_map(|(i, j)| {
                let v = m.get(i, j);
                (v != 0.0).then_some((i, j, v))
            });
        Self::from_triplets(m.rows(), m.cols(), triplets).expect("indices in range")
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Iterates the stored `(col, value)` pairs of row `i`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_offsets[i]..self.row_offsets[i + 1];
        self.col_indices[range.clone()]
            .iter()
            .copied()
            .zip(self.values[range].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.row(i).find(|&(c, _)| c == j).map_or(0.0, |(_, v)| v)
    }

    pub fn spmv(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.ncols, x.len())?;
        let mut y = vec![0.0; self.nrows];
        self.spmv_into(x, &mut y);
        Ok(y)
    }

    /// `y = A x`, summing each row left to right in stored column order.
    pub fn spmv_into(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.ncols);
        debug_assert_eq!(y.len(), self.nrows);
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in self.row_offsets[i]..self.row_offsets[i + 1] {
                acc += self.values[k] * x[self.col_indices[k]];
            }
            *yi = acc;
        }
    }

    /// `r = b - A x`
    pub fn residual_into(&self, x: &[f64], b: &[f64], r: &mut [f64]) {
        self.spmv_into(x, r);
        for (ri, bi) in r.iter_mut().zip(b) {
            *ri = bi - *ri;
        }
    }

    pub fn transpose(&self) -> Self {
        let triplets = (0..self.nrows).flat_map(|i| self.row(i).map(move |(j, v)| (j, i, v)));
        Self::from_triplets(self.ncols, self.nrows, triplets).expect("indices in range")
    }

    /// Sparse product `self * other`.
    pub fn matmul(&self, other: &CsrMatrix) -> Result<Self> {
        check_len(self.ncols, other.nrows)?;
        let mut row_offsets = Vec::with_capacity(self.nrows + 1);
        let mut col_indices = Vec::new();
        let mut values = Vec::new();
        row_offsets.push(0);
        let mut accum = vec![0.0; other.ncols];
        let mut touched = vec![false; other.ncols];
        let mut pattern = Vec::new();
        for i in 0..self.nrows {
            for (k, a) in self.row(i) {
                for (j, b) in other.row(k) {
                    if !touched[j] {
                        touched[j] = true;
                        pattern.push(j);
                    }
                    accum[j] += a * b;
                }
            }
            pattern.sort_unstable();
            for &j in &pattern {
                col_indices.push(j);
                values.push(accum[j]);
                accum[j] = 0.0;
                touched[j] = false;
            }
            pattern.clear();
            row_offsets.push(values.len());
        }
        Ok(Self {
            nrows: self.nrows,
            ncols: other.ncols,
            row_offsets,
            col_indices,
            values,
        })
    }

    /// Multiplies every stored entry by `a`.
    pub fn scale(&mut self, a: f64) {
        scale_in_place(a, &mut self.values);
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.nrows.min(self.ncols)).map(|i| self.get(i, i)).collect()
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.nrows, self.ncols);
        for i in 0..self.nrows {
            for (j, v) in self.row(i) {
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.nrows == self.ncols
            && (0..self.nrows).all(|i| self.row(i).all(|(j, v)| (v - self.get(j, i)).abs() <= tol))
    }
}

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        check_len(rows * cols, data.len())?;
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.set(i, i, d);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let data = (0..rows * cols).map(|k| f(k / cols, k % cols)).collect();
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.cols, x.len())?;
        let mut y = vec![0.0; self.rows];
        self.matvec_into(x, &mut y);
        Ok(y)
    }

    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        for (row, yi) in self.data.chunks_exact(self.cols).zip(y.iter_mut()) {
            *yi = dot_unchecked(row, x);
        }
    }

    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        check_len(self.cols, other.rows)?;
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }
}

/// Parameters of [`spectral_radius_estimate`].
#[derive(Debug, Clone, Copy)]
pub struct GrowthEstimator {
    /// Minimum number of applications of the map.
    pub iters: usize,
    /// Agreement required between the two halves of the averaging window
    /// before the estimate is accepted; otherwise the run is extended.
    pub tol: f64,
    pub seed: u64,
}

impl Default for GrowthEstimator {
    fn default() -> Self {
        Self {
            iters: 2000,
            tol: 1e-3,
            seed: DEFAULT_SEED,
        }
    }
}

/// Longest run, as a multiple of `iters`, before the estimator gives up
/// on window agreement and returns what it has.
const MAX_EXTENSION: usize = 8;

/// Estimates the spectral radius of the linear map `apply` (which writes
/// `A v` into its second argument) from the asymptotic growth rate of
/// `‖A^k v‖`.
///
/// The iterate is renormalized after every application. The estimate is the
/// geometric mean of the per-step growth factors over the last quarter of
/// the run. Works for maps whose dominant eigenvalues are complex or
/// defective, where a Rayleigh quotient would not settle.
pub fn spectral_radius_estimate<F>(mut apply: F, dim: usize, opts: &GrowthEstimator) -> Result<f64>
where
    F: FnMut(&[f64], &mut [f64]),
{
    if opts.iters < 10 {
        return Err(Error::InvalidArgument(format!(
            "need at least 10 iterations, got {}",
            opts.iters
        )));
    }
    if dim == 0 {
        return Ok(0.0);
    }
    let mut v = random_vector(dim, opts.seed);
    let n0 = norm2(&v);
    scale_in_place(1.0 / n0, &mut v);
    let mut w = vec![0.0; dim];
    let mut log_growth = Vec::with_capacity(opts.iters);
    let mut total = opts.iters;
    loop {
        while log_growth.len() < total {
            apply(&v, &mut w);
            let growth = norm2(&w);
            if !growth.is_finite() {
                return Err(Error::DivergentMap);
            }
            if growth == 0.0 {
                // nilpotent on the start vector
                return Ok(0.0);
            }
            log_growth.push(growth.ln());
            for (vi, wi) in v.iter_mut().zip(&w) {
                *vi = wi / growth;
            }
        }
        let window = &log_growth[total - total / 4..];
        let half = window.len() / 2;
        let mean = |s: &[f64]| s.iter().sum::<f64>() / s.len() as f64;
        let early = mean(&window[..half]).exp();
        let late = mean(&window[half..]).exp();
        if (early - late).abs() <= opts.tol || total >= MAX_EXTENSION * opts.iters {
            return Ok(mean(window).exp());
        }
        total *= 2;
    }
}
