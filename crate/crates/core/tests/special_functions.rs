mod common;

use common::{integrate, tail_integral};
use gmgd::special::{ell, upper_gamma_zero};

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

#[test]
fn upper_gamma_zero_matches_quadrature() {
    let mut worst = 0.0f64;
    for x in log_grid(1e-12, 50.0, 400) {
        let want = tail_integral(x, 1.0);
        let got = upper_gamma_zero(x).unwrap();
        worst = worst.max(((got - want) / want).abs());
    }
    assert!(worst <= 1e-12, "worst relative error {worst:e}");
}

#[test]
fn ell_matches_quadrature_on_grid() {
    for p in [0.5, 1.0, 2.0] {
        let mut worst = 0.0f64;
        for u in log_grid(1e-6, 10.0, 1000) {
            let want = tail_integral(u, p);
            let got = ell(u, p).unwrap();
            worst = worst.max(((got - want) / want).abs());
        }
        assert!(worst <= 1e-9, "p = {p}: worst relative error {worst:e}");
    }
}

#[test]
fn quadrature_confirms_frozen_constants() {
    assert!((tail_integral(1.0, 1.0) - 0.21938393439552).abs() < 1e-11);
    assert!((tail_integral(0.1, 1.0) - 1.82292395841939).abs() < 1e-11);
}

#[test]
fn both_branches_agree_with_oracle_at_the_seam() {
    for x in [1.0 - 1e-9, 1.0, 1.0 + 1e-9] {
        let want = tail_integral(x, 1.0);
        assert!(((upper_gamma_zero(x).unwrap() - want) / want).abs() < 1e-12);
    }
}

#[test]
fn quadrature_is_exact_on_polynomials() {
    let v = integrate(|x| x.powi(7) - 3.0 * x * x, 0.0, 2.0);
    assert!((v - (2f64.powi(8) / 8.0 - 8.0)).abs() < 1e-12);
}
