use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_distr::LogNormal;
use rand_xoshiro::SplitMix64;
use serde::{Deserialize, Serialize};

use super::stencil::{stencil_slot, Grid2D, StencilOperator};
use crate::error::{Error, Result};

/// Five-point Laplacian `(1/h²)[0,−1,0; −1,4,−1; 0,−1,0]`.
pub fn build_poisson_5pt(grid: Grid2D) -> StencilOperator {
    let s = 1.0 / (grid.h() * grid.h());
    StencilOperator::constant(grid, [0.0, -s, 0.0, -s, 4.0 * s, -s, 0.0, -s, 0.0])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoefficientDistribution {
    LogNormal,
    Uniform,
}

/// Piecewise-constant diffusion coefficient, one value per cell. A grid
/// with `n` interior nodes per side has `n + 1` cells per side, stored
/// row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientField {
    cells: usize,
    values: Vec<f64>,
}

impl CoefficientField {
    pub fn new(grid: Grid2D, values: Vec<f64>) -> Result<Self> {
        let cells = grid.n() + 1;
        if values.len() != cells * cells {
            return Err(Error::DimensionMismatch {
                expected: cells * cells,
                found: values.len(),
            });
        }
        if let Some(v) = values.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
            return Err(Error::InvalidArgument(format!("diffusion coefficient {v} is not positive")));
        }
        Ok(Self { cells, values })
    }

    pub fn constant(grid: Grid2D, sigma: f64) -> Result<Self> {
        Self::new(grid, vec![sigma; (grid.n() + 1) * (grid.n() + 1)])
    }

    pub fn cells_per_side(&self) -> usize {
        self.cells
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn cell(&self, ci: usize, cj: usize) -> f64 {
        self.values[cj * self.cells + ci]
    }
}

/// Draws one coefficient per cell: `LogNormal(0, 1)` or `Uniform(0, 1)`
/// (open interval, so every value is positive).
pub fn sample_coefficients(grid: Grid2D, dist: CoefficientDistribution, seed: u64) -> CoefficientField {
    let count = (grid.n() + 1) * (grid.n() + 1);
    let mut rng = SplitMix64::seed_from_u64(seed);
    let values: Vec<f64> = match dist {
        CoefficientDistribution::LogNormal => {
            let d = LogNormal::new(0.0, 1.0).expect("unit log-normal is valid");
            (0..count).map(|_| rng.sample(d)).collect()
        }
        CoefficientDistribution::Uniform => (0..count).map(|_| rng.sample(Open01)).collect(),
    };
    CoefficientField::new(grid, values).expect("sampled coefficients are positive")
}

/// Bilinear stiffness of the unit-coefficient square, local vertex order
/// (0,0), (1,0), (1,1), (0,1). Independent of `h` in two dimensions.
const ELEMENT: [[f64; 4]; 4] = [
    [4.0, -1.0, -2.0, -1.0],
    [-1.0, 4.0, -1.0, -2.0],
    [-2.0, -1.0, 4.0, -1.0],
    [-1.0, -2.0, -1.0, 4.0],
];
const LOCAL: [(isize, isize); 4] = [(0, 0), (1, 0), (1, 1), (0, 1)];

/// Bilinear finite-element discretization of `−∇·(σ∇u)` with homogeneous
/// Dirichlet data. Element `e` contributes `(σ_e/6)·K` to its four vertices.
pub fn build_fem_diffusion(grid: Grid2D, sigma: &CoefficientField) -> Result<StencilOperator> {
    let n = grid.n();
    if sigma.cells_per_side() != n + 1 {
        return Err(Error::DimensionMismatch {
            expected: n + 1,
            found: sigma.cells_per_side(),
        });
    }
    let mut stencils = vec![[0.0; 9]; grid.len()];
    let ni = n as isize;
    for cj in 0..=n {
        for ci in 0..=n {
            let scale = sigma.cell(ci, cj) / 6.0;
            // interior node index of a cell vertex is its global index − 1
            let node = |a: usize| (ci as isize + LOCAL[a].0 - 1, cj as isize + LOCAL[a].1 - 1);
            for a in 0..4 {
                let (ia, ja) = node(a);
                if !(0..ni).contains(&ia) || !(0..ni).contains(&ja) {
                    continue;
                }
                let row = &mut stencils[grid.index(ia as usize, ja as usize)];
                for b in 0..4 {
                    let (ib, jb) = node(b);
                    if (0..ni).contains(&ib) && (0..ni).contains(&jb) {
                        row[stencil_slot(ib - ia, jb - ja)] += scale * ELEMENT[a][b];
                    }
                }
            }
        }
    }
    Ok(StencilOperator::from_stencils(grid, stencils))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProblemKind {
    Poisson,
    DiffusionLognormal,
    DiffusionUniform,
}

impl ProblemKind {
    pub fn distribution(&self) -> Option<CoefficientDistribution> {
        match self {
            Self::Poisson => None,
            Self::DiffusionLognormal => Some(CoefficientDistribution::LogNormal),
            Self::DiffusionUniform => Some(CoefficientDistribution::Uniform),
        }
    }
}

/// A discretized model problem with unit source term.
#[derive(Debug, Clone)]
pub struct Problem {
    pub kind: ProblemKind,
    pub op: StencilOperator,
    pub rhs: Vec<f64>,
}

impl Problem {
    /// Poisson uses the scaled difference stencil with `f = 1`; the
    /// finite-element problems use the load vector `h²·f` with `f = 1`.
    pub fn build(kind: ProblemKind, n: usize, seed: u64) -> Result<Self> {
        let grid = Grid2D::new(n)?;
        let (op, load) = match kind.distribution() {
            None => (build_poisson_5pt(grid), 1.0),
            Some(dist) => {
                let sigma = sample_coefficients(grid, dist, seed);
                (build_fem_diffusion(grid, &sigma)?, grid.h() * grid.h())
            }
        };
        Ok(Self {
            kind,
            op,
            rhs: vec![load; grid.len()],
        })
    }

    pub fn grid(&self) -> Grid2D {
        self.op.grid()
    }
}
