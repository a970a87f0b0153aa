use std::io::Write;

use serde::Serialize;
use statrs::function::gamma::{gamma, gamma_lr};

use crate::error::{domain, Result};
use crate::large_jumps::GmgdSpec;
use crate::path::format_number;
use crate::spectral::AtomSet;

/// One point of the small-jump convergence diagnostic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergencePoint {
    pub epsilon: f64,
    pub ratio: f64,
}

/// `γ(s, x) / x^s = Σ_k (-x)^k / (k! (s + k))`, the normalized lower
/// incomplete gamma function.
fn scaled_lower_gamma(s: f64, x: f64) -> f64 {
    if x == 0.0 {
        return 1.0 / s;
    }
    if s == 1.0 {
        return -(-x).exp_m1() / x;
    }
    if x <= 1.0 {
        let mut term = 1.0;
        let mut sum = 1.0 / s;
        for k in 1..200 {
            term *= -x / k as f64;
            let add = term / (s + k as f64);
            sum += add;
            if add.abs() < 1e-17 * sum.abs() {
                break;
            }
        }
        sum
    } else {
        gamma_lr(s, x) * gamma(s) / x.powf(s)
    }
}

/// For each `ε`, the ratio of `ε^{-p'} ∫_{(0,ε]C} |x|^{p'} ν(dx)` to its small-`ε`
/// limit `σ(C)/p'`, where `ν` is the GMGD Lévy measure of `spec` and `p'` is
/// `p_test`. Ratios tend to 1 as `ε ↓ 0`; an empty sector gives ratio 1.
pub fn convergence_check(
    spec: &GmgdSpec,
    sector: &AtomSet,
    p_test: f64,
    epsilons: &[f64],
) -> Result<Vec<ConvergencePoint>> {
    if !(p_test.is_finite() && p_test > 0.0) {
        return Err(domain(format!("p_test must be positive, got {p_test}")));
    }
    if let Some(e) = epsilons.iter().find(|e| !(e.is_finite() && **e > 0.0)) {
        return Err(domain(format!("epsilon values must be positive, got {e}")));
    }
    if epsilons.windows(2).any(|w| w[1] >= w[0]) {
        return Err(domain("epsilon values must be strictly decreasing"));
    }
    let sigma = spec.spectral();
    sector.validate(sigma)?;
    let limit_mass = sigma.mass_of(sector);
    let p = spec.p();
    let s = p_test / p;
    Ok(epsilons
        .iter()
        .map(|&epsilon| {
            if limit_mass == 0.0 {
                return ConvergencePoint { epsilon, ratio: 1.0 };
            }
            let ep = epsilon.powf(p);
            let scaled: f64 = (0..sigma.len())
                .filter(|&i| sector.contains(i))
                .map(|i| {
                    let inner: f64 = spec.thorin()[i]
                        .points()
                        .iter()
                        .map(|&(v, q)| q * scaled_lower_gamma(s, v * ep))
                        .sum();
                    sigma.weights()[i] * inner / p
                })
                .sum();
            ConvergencePoint { epsilon, ratio: scaled * p_test / limit_mass }
        })
        .collect())
}

pub fn write_convergence_csv<W: Write>(points: &[ConvergencePoint], mut w: W) -> Result<()> {
    writeln!(w, "epsilon,ratio")?;
    for pt in points {
        writeln!(w, "{},{}", format_number(pt.epsilon), format_number(pt.ratio))?;
    }
    Ok(())
}
