use approx::assert_relative_eq;
use kaczmarz_phase::checks::expectation_instance;
use kaczmarz_phase::theory::probability::{log_eig_failure, log_norm_failure};
use kaczmarz_phase::theory::{
    c2_asymptotic, c2_small_error, failure_probability_terms, ln_binomial, lower_bound_rate,
    solve_beta0, tau_from_mass, truncated_square_mean_limit,
};
use proptest::prelude::*;
use statrs::distribution::{Continuous, Normal};

/// Composite Simpson rule for `(1/t) int_{-tau}^{tau} x^2 phi(x) dx`.
fn quadrature_mean(t: f64) -> f64 {
    let tau = tau_from_mass(t).unwrap();
    let phi = Normal::standard();
    let k = 20_000;
    let h = 2.0 * tau / k as f64;
    let f = |x: f64| x * x * phi.pdf(x);
    let mut s = f(-tau) + f(tau);
    for i in 1..k {
        let x = -tau + i as f64 * h;
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(x);
    }
    s * h / 3.0 / t
}

#[test]
fn truncated_mean_matches_quadrature() {
    for t in [0.01, 0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99] {
        let exact = truncated_square_mean_limit(t).unwrap();
        assert!((exact - quadrature_mean(t)).abs() < 1e-8, "t = {t}");
    }
}

#[test]
fn expectation_agrees_with_simulated_steps() {
    let mut outside = 0;
    for seed in 0..12 {
        let s = expectation_instance(6, 30, 40_000, seed, 0.3).unwrap();
        outside += usize::from(s.z_score().abs() > 4.0);
    }
    assert!(outside <= 1);
}

#[test]
fn rate_bounds_sandwich_in_small_error_regime() {
    for alpha in [8.0, 12.0, 20.0] {
        for n in [64, 256, 1024] {
            let upper = 1.0 - c2_small_error(alpha) / n as f64;
            let lower = lower_bound_rate(alpha, n);
            assert!(lower < upper && upper < 1.0, "alpha {alpha} n {n}");
        }
    }
}

#[test]
fn beta0_root_satisfies_equation() {
    let b = solve_beta0(10.0, 0.1).unwrap();
    let t = b.beta0 / 10.0;
    let rhs =
        (1.0 + 1.0 / b.beta0.sqrt() + (2.0 * (std::f64::consts::E * 10.0 / b.beta0).ln()).sqrt())
            .powi(2)
            * 0.01;
    assert!((truncated_square_mean_limit(t).unwrap() - rhs).abs() < 1e-8);
}

#[test]
fn failure_terms_use_exact_binomials() {
    let f = failure_probability_terms(12.0, 256, 0.5, 0.5, 0.5, 0.5).unwrap();
    let [norm, mismatch, correct] = f.exact();
    assert_relative_eq!(
        norm,
        log_norm_failure(3072.0, 256.0, 0.5).unwrap(),
        max_relative = 1e-12
    );
    let k = 128.0;
    let expect = ln_binomial(3072.0, k).unwrap() - k * 0.125;
    assert_relative_eq!(
        expect,
        log_eig_failure(3072.0, k, 0.5).unwrap(),
        max_relative = 1e-12
    );
    assert_relative_eq!(mismatch, expect, max_relative = 1e-12);
    let right = 3072.0 - k;
    assert_relative_eq!(
        correct,
        ln_binomial(3072.0, right).unwrap() - right * 0.125,
        max_relative = 1e-12
    );
    assert!(f.log_total().is_finite());
}

proptest! {
    #[test]
    fn c2_decreases_in_beta0(alpha in 8.0f64..40.0, b in 1e-4f64..0.5) {
        prop_assert!(c2_asymptotic(alpha, b).unwrap() < c2_small_error(alpha));
        prop_assert!(c2_asymptotic(alpha, b * 1.5).unwrap() < c2_asymptotic(alpha, b).unwrap());
    }

    #[test]
    fn binomial_relaxation_dominates(alpha in 2.0f64..30.0, frac in 0.001f64..0.5, n in 10usize..100_000) {
        let nf = n as f64;
        let beta = frac * alpha;
        let k = beta * nf;
        let m = alpha * nf;
        prop_assert!(ln_binomial(m, k).unwrap() <= k * (std::f64::consts::E * alpha / beta).ln() + 1e-9 * k);
    }

    #[test]
    fn beta0_monotone_in_error(alpha in 5.0f64..30.0, rho in 0.0f64..0.5) {
        let a = solve_beta0(alpha, rho).unwrap().beta0;
        let b = solve_beta0(alpha, rho + 0.01).unwrap().beta0;
        prop_assert!(b >= a);
        prop_assert!((0.0..=alpha).contains(&a));
    }
}
