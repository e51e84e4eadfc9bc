//! Geometric multigrid for 2-D elliptic model problems on the unit square:
//! five-point Poisson and bilinear finite elements for `−∇·(σ∇u) = f`.

mod cycle;
mod problem;
mod relax;
mod stencil;
mod transfer;

pub use cycle::{Coarsening, CycleSpec, MultigridHierarchy, COARSEST_MAX_UNKNOWNS};
pub use problem::{
    build_fem_diffusion, build_poisson_5pt, sample_coefficients, CoefficientDistribution, CoefficientField,
    Problem, ProblemKind,
};
pub use relax::{relax_sweep, Relaxation};
pub use stencil::{stencil_slot, Grid2D, StencilOperator};
pub use transfer::{galerkin_coarsen, prolong_bilinear, restrict_full_weighting, restriction_matrix};
