//! Exponential integral kernels.
//!
//! `Γ(0, x) = E₁(x)` is evaluated with the power series below `x = 1` and a
//! modified-Lentz continued fraction above it.

use crate::error::{domain, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const SERIES_CROSSOVER: f64 = 1.0;
const EPS: f64 = 1e-16;
const TINY: f64 = 1e-300;
const MAX_ITER: usize = 500;

/// Upper incomplete gamma function at order zero, `Γ(0, x) = ∫_x^∞ y⁻¹ e^{-y} dy`.
pub fn upper_gamma_zero(x: f64) -> Result<f64> {
    if !x.is_finite() || x <= 0.0 {
        return Err(domain(format!("Γ(0, x) requires finite x > 0, got {x}")));
    }
    Ok(if x < SERIES_CROSSOVER {
        e1_series(x)
    } else {
        e1_continued_fraction(x)
    })
}

fn e1_series(x: f64) -> f64 {
    // Σ_{k≥1} (-1)^{k+1} x^k / (k·k!)
    let mut sum = 0.0;
    let mut power_over_fact = 1.0;
    for k in 1..MAX_ITER {
        let kf = k as f64;
        power_over_fact *= -x / kf;
        let term = power_over_fact / kf;
        sum += term;
        if term.abs() < EPS * sum.abs() {
            break;
        }
    }
    -EULER_GAMMA - x.ln() - sum
}

fn e1_continued_fraction(x: f64) -> f64 {
    let mut b = x + 1.0;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let delta = c * d;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }
    }
    h * (-x).exp()
}

/// Tail integral `ℓ(u) = ∫_u^∞ r⁻¹ e^{-r^p} dr = Γ(0, u^p) / p`.
pub fn ell(u: f64, p: f64) -> Result<f64> {
    if !u.is_finite() || u <= 0.0 {
        return Err(domain(format!("ℓ(u) requires finite u > 0, got {u}")));
    }
    if !p.is_finite() || p <= 0.0 {
        return Err(domain(format!("ℓ(u) requires finite p > 0, got {p}")));
    }
    let x = u.powf(p);
    if x.is_infinite() {
        return Ok(0.0);
    }
    Ok(upper_gamma_zero(x)? / p)
}
