//! The max-density constant rests on
//! `∫_{R_+^k} Π x_i^{γ−1} (1 + Σx_i)^{−1} dx = Γ(γ)^k Γ(1 − kγ)`;
//! check it by brute-force quadrature in log coordinates.

use gammasum::certify::{gk_lower_constant, gk_upper_constant};
use gammasum::numerics::quadrature::{integrate, Interval};
use gammasum::numerics::log_gamma;
use gammasum::QuadratureConfig;

const HALF_WIDTH: f64 = 160.0;

fn brute_force(shape: f64, k: usize) -> f64 {
    let cfg = QuadratureConfig::new(1e-13, 1e-11, 1 << 15, 1.0).unwrap();
    let range = Interval::new(-HALF_WIDTH, HALF_WIDTH);
    match k {
        // x = e^u: x^γ/(1+x) du
        1 => integrate(|u| (shape * u - u.exp().ln_1p()).exp(), range, &cfg).unwrap().value,
        2 => integrate(
            |u| {
                integrate(
                    |w| (shape * (u + w) - (u.exp() + w.exp()).ln_1p()).exp(),
                    range,
                    &cfg,
                )
                .unwrap()
                .value
            },
            range,
            &cfg,
        )
        .unwrap()
        .value,
        _ => unreachable!(),
    }
}

fn closed_form(shape: f64, k: usize) -> f64 {
    (k as f64 * log_gamma(shape).unwrap() + log_gamma(1.0 - k as f64 * shape).unwrap()).exp()
}

#[test]
fn dirichlet_integral_matches_gamma_product() {
    for (shape, k) in [(0.3, 1), (0.75, 1), (0.3, 2), (0.4, 2)] {
        let (b, c) = (brute_force(shape, k), closed_form(shape, k));
        assert!((b - c).abs() <= 1e-7 * c, "γ = {shape}, k = {k}: {b} vs {c}");
    }
}

#[test]
fn two_sided_constants_are_ordered() {
    for (k, g) in [(1, 0.5), (1, 0.75), (1, 0.99), (2, 0.34), (2, 0.45), (3, 0.26), (3, 0.3)] {
        let (lo, hi) = (gk_lower_constant(g, k), gk_upper_constant(g, k));
        assert!(lo > 0.0 && lo <= hi, "k = {k}, γ = {g}: {lo} > {hi}");
    }
}
