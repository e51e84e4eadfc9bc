use std::f64::consts::PI;

use nestersolve::analysis::{power_extreme_eigs, smoothing_range};
use nestersolve::linalg::{spectral_radius_estimate, CsrMatrix, DenseMatrix, GrowthEstimator};
use nestersolve::multigrid::{Coarsening, CycleSpec, MultigridHierarchy, Problem, ProblemKind, Relaxation};
use nestersolve::solvers::DiagonalSweep;
use nestersolve::spectral::{
    chebyshev_asymptotic_rate, companion_rate_oracle, critical_b, critical_c, has_complex_roots,
    optimal_coefficient, rate_complex, rate_real, scalar_recurrence_rate_oracle, ChebyshevParams,
    ScalarScheme, SpectrumBounds,
};
use num_complex::Complex64;
use proptest::prelude::*;

/// Ordered pair `−1 < b1 ≤ bN < 1`.
fn bounds() -> impl Strategy<Value = SpectrumBounds> {
    (-0.99f64..0.99, -0.99f64..0.99).prop_map(|(a, b)| SpectrumBounds::new(a.min(b), a.max(b)).unwrap())
}

fn endpoint_rate(c: f64, b: &SpectrumBounds) -> f64 {
    rate_real(c, b.b1()).unwrap().max(rate_real(c, b.bn()).unwrap())
}

fn cases(n: u32) -> ProptestConfig {
    ProptestConfig::with_cases(n)
}

proptest! {
    #![proptest_config(cases(256))]

    #[test]
    fn optimal_coefficient_is_a_contraction(b in bounds()) {
        let opt = optimal_coefficient(&b);
        prop_assert!(opt.c_star.abs() < 1.0);
        prop_assert!(opt.r_star < 1.0);
        if (b.b1() + b.bn()).abs() > 1e-9 {
            prop_assert!(opt.r_star < b.spectral_radius());
        }
    }

    #[test]
    fn rate_is_maximized_at_the_endpoints(b in bounds(), c in -0.99f64..0.99) {
        let ends = endpoint_rate(c, &b);
        for k in 0..=400 {
            let x = b.b1() + (b.bn() - b.b1()) * k as f64 / 400.0;
            prop_assert!(rate_real(c, x).unwrap() <= ends + 1e-12);
        }
    }

    #[test]
    fn critical_c_minimizes_the_rate(x in -0.99f64..0.99) {
        let step = 1e-4;
        let (mut best_c, mut best) = (0.0, f64::INFINITY);
        let mut c = -1.0 + step;
        while c < 1.0 {
            let r = rate_real(c, x).unwrap();
            if r < best {
                (best_c, best) = (c, r);
            }
            c += step;
        }
        prop_assert!((best_c - critical_c(x).unwrap()).abs() <= 2.0 * step);
    }

    #[test]
    fn no_coefficient_beats_the_optimum(b in bounds()) {
        let opt = optimal_coefficient(&b);
        let mut c = -0.999;
        while c < 1.0 {
            prop_assert!(endpoint_rate(c, &b) >= opt.r_star - 1e-9);
            c += 1e-3;
        }
        prop_assert!((endpoint_rate(opt.c_star, &b) - opt.r_star).abs() <= 1e-6);
    }

    #[test]
    fn complex_points_inside_the_radius_keep_the_rate(
        b in bounds(),
        pts in prop::collection::vec((0.0f64..1.0, -PI..PI), 200),
    ) {
        let opt = optimal_coefficient(&b);
        for (u, theta) in pts {
            let z = Complex64::from_polar(opt.robustness_radius * u.sqrt(), theta);
            prop_assert!(rate_complex(opt.c_star, z).unwrap() <= opt.r_star + 1e-9);
        }
    }

    #[test]
    fn complex_rate_grows_with_the_angle(
        (b1, bn) in (0.05f64..0.98).prop_flat_map(|bn| (-bn..=bn, Just(bn))),
        modulus in 0.01f64..0.99,
    ) {
        let b = SpectrumBounds::new(b1, bn).unwrap();
        let c = optimal_coefficient(&b).c_star;
        prop_assert!(c >= 0.0);
        let mut prev = 0.0;
        for k in 0..=400 {
            let theta = PI * k as f64 / 400.0;
            let up = rate_complex(c, Complex64::from_polar(modulus, theta)).unwrap();
            let down = rate_complex(c, Complex64::from_polar(modulus, -theta)).unwrap();
            prop_assert!((up - down).abs() <= 1e-12);
            prop_assert!(up >= prev - 1e-12, "theta {theta}: {up} < {prev}");
            prev = up;
        }
    }

    #[test]
    fn chebyshev_rate_matches_the_recurrence(
        b in bounds(),
        (r, theta) in (0.0f64..0.95, -PI..PI),
    ) {
        prop_assume!(b.bn() - b.b1() > 1e-3);
        let z = Complex64::from_polar(r, theta);
        let params = ChebyshevParams::new(&b).unwrap();
        let predicted = chebyshev_asymptotic_rate(&b, z);
        let measured = scalar_recurrence_rate_oracle(&ScalarScheme::Chebyshev(params), z, 4000).unwrap();
        prop_assert!((predicted - measured).abs() <= 2e-2, "{predicted} vs {measured}");
    }

    #[test]
    fn spmv_matches_dense(
        (rows, cols, entries, x) in (1usize..=100, 1usize..=100).prop_flat_map(|(r, c)| (
            Just(r),
            Just(c),
            prop::collection::vec((0..r, 0..c, -10.0f64..10.0), 0..300),
            prop::collection::vec(-1.0f64..1.0, c),
        )),
    ) {
        let a = CsrMatrix::from_triplets(rows, cols, entries.clone()).unwrap();
        let mut dense = DenseMatrix::zeros(rows, cols);
        for (i, j, v) in entries {
            dense.set(i, j, dense.get(i, j) + v);
        }
        let y = a.spmv(&x).unwrap();
        let z = dense.matvec(&x).unwrap();
        for (u, v) in y.iter().zip(&z) {
            prop_assert!((u - v).abs() <= 1e-12 * (1.0 + v.abs()));
        }
    }
}

proptest! {
    #![proptest_config(cases(50))]

    #[test]
    fn companion_oracle_reproduces_the_optimal_rate(b in bounds()) {
        let opt = optimal_coefficient(&b);
        let spectrum = [Complex64::new(b.b1(), 0.0), Complex64::new(b.bn(), 0.0)];
        let measured = companion_rate_oracle(opt.c_star, &spectrum).unwrap();
        prop_assert!((measured - opt.r_star).abs() <= 1e-3, "{measured} vs {}", opt.r_star);
    }

    #[test]
    fn growth_estimator_finds_the_largest_diagonal_entry(
        diag in prop::collection::vec(-0.99f64..0.99, 1..=50),
        seed in any::<u64>(),
    ) {
        let rho = diag.iter().fold(0.0f64, |m, d| m.max(d.abs()));
        prop_assume!(rho > 0.05);
        let opts = GrowthEstimator { seed, ..GrowthEstimator::default() };
        let est = spectral_radius_estimate(
            |v, w| {
                for ((wi, vi), d) in w.iter_mut().zip(v).zip(&diag) {
                    *wi = d * vi;
                }
            },
            diag.len(),
            &opts,
        )
        .unwrap();
        prop_assert!((est - rho).abs() <= 1e-2 * rho, "{est} vs {rho}");
    }

    #[test]
    fn power_method_finds_the_dominant_eigenvalue(
        (top, rest) in (0.3f64..0.99, any::<bool>()).prop_flat_map(|(m, neg)| (
            Just(if neg { -m } else { m }),
            prop::collection::vec(-(m - 0.05)..(m - 0.05), 1..40),
        )),
        seed in any::<u64>(),
    ) {
        let mut diag = rest;
        diag.push(top);
        let est = power_extreme_eigs(&DiagonalSweep::new(diag), 400, None, seed).unwrap();
        prop_assert!(!est.complex_dominant);
        prop_assert!((est.dominant - top).abs() <= 1e-3, "{} vs {top}", est.dominant);
    }
}

#[test]
fn discriminant_sign_follows_the_coefficient_sign() {
    for i in -99..=99 {
        let c = i as f64 / 100.0;
        let bcr = if c == 0.0 { 0.0 } else { critical_b(c).unwrap() };
        for k in -299..=99 {
            let b = k as f64 / 100.0 + 1e-3;
            let disc = (1.0 + c).powi(2) * b * b - 4.0 * c * b;
            let expected = c * b > 0.0 && b.abs() < bcr.abs();
            assert_eq!(has_complex_roots(c, b), expected, "c = {c}, b = {b}");
            if (b - bcr).abs() > 1e-9 {
                assert_eq!(disc < 0.0, expected, "c = {c}, b = {b}");
            }
        }
    }
}

#[test]
fn complex_rate_agrees_with_real_rate_on_the_axis() {
    for i in -99..=99 {
        let c = i as f64 / 100.0;
        for k in -299..=99 {
            let b = k as f64 / 100.0;
            let real = rate_real(c, b).unwrap();
            let complex = rate_complex(c, Complex64::new(b, 0.0)).unwrap();
            assert!((real - complex).abs() <= 1e-12, "c = {c}, b = {b}: {real} vs {complex}");
        }
    }
}

#[test]
fn smoothing_analysis_predicts_the_power_estimate() {
    let problem = Problem::build(ProblemKind::Poisson, 127, 0).unwrap();
    for omega in [0.8, 8.0 / 13.0] {
        let relax = Relaxation::Jacobi { omega };
        let spec = CycleSpec::new(1, 0, relax, Coarsening::Rediscretize);
        let hierarchy = MultigridHierarchy::new(&problem, spec).unwrap();
        let predicted = smoothing_range(omega, 257).unwrap().bn_hat;
        let est = power_extreme_eigs(&hierarchy, 100, None, 7).unwrap();
        assert!((est.upper() - predicted).abs() <= 0.05, "omega {omega}: {} vs {predicted}", est.upper());
    }
}
