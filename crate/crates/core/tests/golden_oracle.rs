//! Brute-force oracles for the golden constants, independent of the
//! adaptive-quadrature path used by the library: composite Simpson with 1e7
//! panels, and the Fubini form for the phi value so no nested integral is
//! needed. The frozen fixture values must match both the oracle and the
//! runtime evaluators.

use fatcw::kernels::{ell, KernelContext};
use std::collections::HashMap;

fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut acc = f(a) + f(b);
    for k in 1..panels {
        let x = a + k as f64 * h;
        acc += if k % 2 == 0 { 2.0 } else { 4.0 } * f(x);
    }
    acc * h / 3.0
}

fn ramp(x: f64) -> f64 {
    ell(3.0 * x) * ell(3.0 - 3.0 * x)
}

fn golden() -> HashMap<String, f64> {
    let text = include_str!("../fixtures/golden_constants.txt");
    text.lines()
        .filter(|l| !l.trim_start().starts_with('#') && l.contains('='))
        .map(|l| {
            let (k, v) = l.split_once('=').unwrap();
            (k.trim().to_string(), v.trim().parse::<f64>().unwrap())
        })
        .collect()
}

#[test]
fn simpson_oracle_reproduces_frozen_constants() {
    let g = golden();
    let n = 10_000_000;
    let alpha = simpson(ramp, 0.0, 1.0, n);
    assert!((alpha - g["alpha"]).abs() < 1e-12, "alpha {alpha}");
    let e43 = (4.0f64 / 3.0).exp() * alpha;
    assert!((e43 - g["e43_alpha"]).abs() < 1e-12);
    // the 8-digit reference value
    assert!((e43 - 0.55731493).abs() <= 5e-8);
    assert!(e43 > 11.0 / 20.0);
    // phi(0) = ∫_0^{1/2} lambda = (1/alpha) ∫_0^{1/2} ramp(y) (1/2 - y) dy
    let phi0 = simpson(|y| ramp(y) * (0.5 - y), 0.0, 0.5, n) / alpha;
    assert!((phi0 - g["phi_zero"]).abs() < 1e-12, "phi0 {phi0}");
    assert!(phi0 > 0.0 && phi0 < 0.125);
    // lambda'(1/2) = ell(3/2)^2 / alpha = 1/(e^{4/3} alpha)
    let lp = ell(1.5) * ell(1.5) / alpha;
    assert!((lp - g["lambda_prime_half"]).abs() < 1e-12);
    assert!((lp - 1.0 / e43).abs() < 1e-14);
    assert!(lp < 20.0 / 11.0);
}

#[test]
fn runtime_evaluators_match_golden_constants() {
    let g = golden();
    let ctx = KernelContext::new().unwrap();
    assert!((ctx.alpha() - g["alpha"]).abs() < 1e-12);
    assert!((ctx.phi(0.0) - g["phi_zero"]).abs() < 1e-10);
    assert!((ctx.lambda_prime(0.5) - g["lambda_prime_half"]).abs() < 1e-10);
    let j = fatcw::maps::phi_hat_radial_jacobian(&ctx, 1.2, 0.5);
    assert!((j - g["phi_hat_radial_jacobian_at_1p2_0p5"]).abs() < 1e-9);
}

#[test]
fn nested_quadrature_phi_matches_fubini_route() {
    // the context's phi cache chains lambda-cache -> panel integration;
    // phi_quadrature is the independent single-integral route
    let ctx = KernelContext::new().unwrap();
    for k in 0..=20 {
        let t = -0.5 + k as f64 / 20.0;
        assert!(
            (ctx.phi(t) - ctx.phi_quadrature(t)).abs() < 1e-10,
            "t={t}"
        );
    }
}
