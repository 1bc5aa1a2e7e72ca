use std::f64::consts::PI;

use gammasum::numerics::{digamma, gamma, log_gamma};
use proptest::prelude::*;

#[test]
fn log_gamma_recurrence_on_a_log_grid() {
    for k in 0..1000 {
        let x = 1e-3 * (170.0f64 / 1e-3).powf(k as f64 / 999.0);
        let lhs = log_gamma(x + 1.0).unwrap();
        let rhs = log_gamma(x).unwrap() + x.ln();
        assert!(
            (lhs - rhs).abs() <= 1e-13 * lhs.abs().max(1.0),
            "x = {x}: {lhs} vs {rhs}"
        );
    }
}

#[test]
fn known_values() {
    assert!((log_gamma(0.5).unwrap() - 0.5 * PI.ln()).abs() < 1e-15);
    assert!((gamma(5.0).unwrap() - 24.0).abs() < 1e-12);
    // ψ(1) = −γ_E
    assert!((digamma(1.0).unwrap() + 0.577_215_664_901_532_9).abs() < 1e-15);
    assert!(log_gamma(0.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn reflection(x in 0.01f64..0.99) {
        let lhs = log_gamma(x).unwrap() + log_gamma(1.0 - x).unwrap();
        let rhs = (PI / (PI * x).sin()).ln();
        prop_assert!((lhs - rhs).abs() < 1e-13);
    }

    #[test]
    fn duplication(x in 0.05f64..60.0) {
        // Γ(x)Γ(x+½) = 2^{1−2x}√π Γ(2x)
        let lhs = log_gamma(x).unwrap() + log_gamma(x + 0.5).unwrap();
        let rhs = (1.0 - 2.0 * x) * 2f64.ln() + 0.5 * PI.ln() + log_gamma(2.0 * x).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0));
    }

    #[test]
    fn digamma_recurrence(x in 1e-2f64..100.0) {
        let lhs = digamma(x + 1.0).unwrap() - digamma(x).unwrap();
        prop_assert!((lhs - 1.0 / x).abs() <= 1e-12 * (1.0 / x).max(1.0));
    }

    #[test]
    fn digamma_is_log_gamma_derivative(x in 0.5f64..50.0) {
        let h = 1e-4 * x;
        let fd = (log_gamma(x + h).unwrap() - log_gamma(x - h).unwrap()) / (2.0 * h);
        prop_assert!((fd - digamma(x).unwrap()).abs() < 1e-7);
    }
}
