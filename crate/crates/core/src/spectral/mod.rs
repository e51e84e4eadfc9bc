//! Closed-form theory of the optimal fixed momentum coefficient, the
//! RI-Chebyshev comparison, and brute-force oracles for both.

mod chebyshev;
mod optimal;
mod oracle;
mod rates;
mod region;

pub use chebyshev::{chebyshev_asymptotic_rate, BetaSequence, ChebyshevParams};
pub use optimal::{
    acceleration_ratio, optimal_coefficient, optimal_target, regime_classify,
    OptimalAcceleration, Regime, SpectrumBounds,
};
pub use oracle::{
    companion_rate_oracle, companion_rate_oracle_with, scalar_recurrence_rate_oracle,
    ScalarScheme,
};
pub(crate) use rates::check_momentum;
pub use rates::{critical_b, critical_c, has_complex_roots, rate_complex, rate_real};
pub use region::{region_scan, RegionGrid, RegionMap, RegionPoint, VALIDITY_TOL};
