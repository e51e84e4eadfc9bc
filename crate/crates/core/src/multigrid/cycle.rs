use nalgebra::{DMatrix, DVector, Dyn, LU};
use serde::{Deserialize, Serialize};

use super::problem::{build_poisson_5pt, Problem, ProblemKind};
use super::relax::{relax_in_place, Relaxation};
use super::stencil::StencilOperator;
use super::transfer::{galerkin_coarsen, prolong_add_into, restrict_into};
use crate::error::{Error, Result};
use crate::solvers::StationarySweep;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Coarsening {
    /// Five-point Laplacian on every coarse grid (Poisson only).
    Rediscretize,
    /// `A_c = R A P`.
    Galerkin,
}

/// Default upper bound on the unknowns of the directly solved level.
pub const COARSEST_MAX_UNKNOWNS: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CycleSpec {
    pub nu1: usize,
    pub nu2: usize,
    pub relax: Relaxation,
    pub coarsening: Coarsening,
    /// Coarsening stops once a level has at most this many unknowns.
    #[serde(default = "default_coarsest")]
    pub coarsest_max_unknowns: usize,
}

fn default_coarsest() -> usize {
    COARSEST_MAX_UNKNOWNS
}

impl CycleSpec {
    pub fn new(nu1: usize, nu2: usize, relax: Relaxation, coarsening: Coarsening) -> Self {
        Self {
            nu1,
            nu2,
            relax,
            coarsening,
            coarsest_max_unknowns: COARSEST_MAX_UNKNOWNS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.nu1 + self.nu2 == 0 {
            return Err(Error::InvalidArgument("V-cycle needs nu1 + nu2 >= 1".into()));
        }
        self.relax.validate()
    }
}

/// Operators on successively coarser grids plus a dense LU factorization
/// of the coarsest one. Immutable once built; each cycle allocates its
/// own scratch space.
#[derive(Debug, Clone)]
pub struct MultigridHierarchy {
    spec: CycleSpec,
    levels: Vec<StencilOperator>,
    coarse_lu: LU<f64, Dyn, Dyn>,
}

impl MultigridHierarchy {
    pub fn new(problem: &Problem, spec: CycleSpec) -> Result<Self> {
        if spec.coarsening == Coarsening::Rediscretize && problem.kind != ProblemKind::Poisson {
            return Err(Error::InvalidArgument(
                "rediscretization is only available for the Poisson problem; use galerkin".into(),
            ));
        }
        Self::from_operator(problem.op.clone(), spec)
    }

    /// Builds the hierarchy below `op`. Rediscretization assumes `op` is
    /// the five-point Laplacian.
    pub fn from_operator(op: StencilOperator, spec: CycleSpec) -> Result<Self> {
        spec.validate()?;
        let mut levels = vec![op];
        loop {
            let fine = levels.last().expect("at least one level");
            if fine.dim() <= spec.coarsest_max_unknowns {
                break;
            }
            let Some(coarse_grid) = fine.grid().coarsen() else { break };
            let coarse = match spec.coarsening {
                Coarsening::Rediscretize => build_poisson_5pt(coarse_grid),
                Coarsening::Galerkin => galerkin_coarsen(fine)?,
            };
            levels.push(coarse);
        }
        for op in &levels[..levels.len() - 1] {
            if let Some(k) = op.zero_diagonal() {
                return Err(Error::ZeroDiagonal(k));
            }
        }
        let coarsest = levels.last().expect("at least one level").to_csr().to_dense();
        let m = DMatrix::from_row_slice(coarsest.rows(), coarsest.cols(), coarsest.data());
        let coarse_lu = m.lu();
        if !coarse_lu.is_invertible() {
            return Err(Error::SingularCoarseOperator);
        }
        Ok(Self {
            spec,
            levels,
            coarse_lu,
        })
    }

    pub fn spec(&self) -> &CycleSpec {
        &self.spec
    }

    pub fn levels(&self) -> &[StencilOperator] {
        &self.levels
    }

    pub fn operator(&self) -> &StencilOperator {
        &self.levels[0]
    }

    /// Grid sizes from finest to coarsest.
    pub fn level_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.grid().n()).collect()
    }

    /// One V(ν1, ν2) cycle on `A x = rhs`, updating `x` in place.
    pub fn v_cycle(&self, x: &mut [f64], rhs: &[f64]) {
        self.cycle(0, x, rhs);
    }

    fn cycle(&self, level: usize, x: &mut [f64], rhs: &[f64]) {
        if level + 1 == self.levels.len() {
            let sol = self
                .coarse_lu
                .solve(&DVector::from_column_slice(rhs))
                .expect("coarse factorization is invertible");
            x.copy_from_slice(sol.as_slice());
            return;
        }
        let op = &self.levels[level];
        let mut scratch = vec![0.0; x.len()];
        for _ in 0..self.spec.nu1 {
            relax_in_place(self.spec.relax, op, x, rhs, &mut scratch);
        }
        op.residual_into(x, rhs, &mut scratch);
        let coarse_grid = self.levels[level + 1].grid();
        let mut coarse_rhs = vec![0.0; coarse_grid.len()];
        restrict_into(&scratch, op.grid(), &mut coarse_rhs);
        let mut correction = vec![0.0; coarse_grid.len()];
        self.cycle(level + 1, &mut correction, &coarse_rhs);
        prolong_add_into(&correction, coarse_grid, x);
        for _ in 0..self.spec.nu2 {
            relax_in_place(self.spec.relax, op, x, rhs, &mut scratch);
        }
    }
}

impl StationarySweep for MultigridHierarchy {
    fn dim(&self) -> usize {
        self.levels[0].dim()
    }

    fn sweep_into(&self, x: &[f64], rhs: &[f64], out: &mut [f64]) {
        out.copy_from_slice(x);
        self.v_cycle(out, rhs);
    }
}
