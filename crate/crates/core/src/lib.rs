//! Momentum acceleration of stationary iterative solvers.
//!
//! Given a stationary sweep with real iteration-matrix eigenvalues in
//! `[b1, bN]`, this crate computes the optimal fixed Nesterov momentum
//! `c*` and its rate `r*`, compares it with Chebyshev semi-iteration and
//! Krylov baselines, and applies all of them to multigrid V-cycles on
//! model elliptic problems.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod analysis;
pub mod error;
pub mod experiment;
pub mod linalg;
pub mod multigrid;
pub mod report;
pub mod solvers;
pub mod spectral;

pub use error::{Error, Result};
pub use analysis::{PowerEstimate, SymbolRange};
pub use linalg::{CsrMatrix, DenseMatrix, GrowthEstimator};
pub use multigrid::{Coarsening, CycleSpec, Grid2D, MultigridHierarchy, Problem, ProblemKind, Relaxation, StencilOperator};
pub use solvers::{IterationTrace, SolveOutput, StationarySweep, StopRule};
pub use spectral::{OptimalAcceleration, Regime, SpectrumBounds};
