//! Test-only reference implementations, independent of the library's numerics.

#![allow(dead_code)]

use std::sync::OnceLock;

/// Gauss–Legendre nodes and weights on [-1, 1], from Newton iteration on P_n.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        loop {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                let (mut q0, mut q1) = (1.0, x);
                for k in 2..=n {
                    let q2 = ((2 * k - 1) as f64 * x * q1 - (k - 1) as f64 * q0) / k as f64;
                    q0 = q1;
                    q1 = q2;
                }
                let dq = n as f64 * (x * q1 - q0) / (x * x - 1.0);
                nodes[i] = x;
                weights[i] = 2.0 / ((1.0 - x * x) * dq * dq);
                break;
            }
        }
    }
    (nodes, weights)
}

fn rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(20))
}

fn panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let (x, w) = rule();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    x.iter().zip(w).map(|(xi, wi)| wi * f(mid + half * xi)).sum::<f64>() * half
}

fn adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, whole: f64, abs_tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let left = panel(f, a, m);
    let right = panel(f, m, b);
    let diff = (left + right - whole).abs();
    if depth == 0 || diff <= abs_tol || diff <= 8.0 * f64::EPSILON * (left + right).abs() {
        return left + right;
    }
    adaptive(f, a, m, left, 0.5 * abs_tol, depth - 1) + adaptive(f, m, b, right, 0.5 * abs_tol, depth - 1)
}

/// Adaptive 20-point Gauss–Legendre quadrature of `f` over `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    integrate_tol(f, a, b, 1e-14)
}

pub fn integrate_tol<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    let whole = panel(&f, a, b);
    let abs_tol = tol * whole.abs().max(f64::MIN_POSITIVE);
    adaptive(&f, a, b, whole, abs_tol, 30)
}

/// `∫_u^∞ r⁻¹ e^{-r^p} dr`, integrated on the log scale `r = e^y`, where the
/// integrand `exp(-e^{py})` decays doubly exponentially.
pub fn tail_integral(u: f64, p: f64) -> f64 {
    let lo = u.ln();
    let hi = (800.0f64).ln() / p;
    if lo >= hi {
        return 0.0;
    }
    // split at y = 0 where the integrand turns over
    let f = |y: f64| (-(p * y).exp()).exp();
    if lo < 0.0 && hi > 0.0 {
        integrate(f, lo, 0.0) + integrate(f, 0.0, hi)
    } else {
        integrate(f, lo, hi)
    }
}

/// `∫_a^b r⁻¹ e^{-r^p} dr` for `0 < a < b < ∞`.
pub fn band_integral(a: f64, b: f64, p: f64) -> f64 {
    integrate(|y: f64| (-(p * y).exp()).exp(), a.ln(), b.ln())
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64
}

pub fn covariance(xs: &[f64], ys: &[f64]) -> f64 {
    let (mx, my) = (mean(xs), mean(ys));
    xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Projection `⟨z, x⟩`.
pub fn project(z: &[f64], x: &[f64]) -> f64 {
    z.iter().zip(x).map(|(a, b)| a * b).sum()
}

/// Sorted copy plus the CDF values at each point, obtained by integrating a
/// density piece by piece along the sorted sample starting from `lower`.
pub fn cumulative_cdf<F: Fn(f64) -> f64>(sample: &[f64], lower: f64, density: F) -> (Vec<f64>, Vec<f64>) {
    let mut sorted = sample.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut acc = 0.0;
    let mut prev = lower;
    let mut cdf = Vec::with_capacity(sorted.len());
    for &x in &sorted {
        if x > prev {
            acc += integrate_tol(&density, prev, x, 1e-12);
            prev = x;
        }
        cdf.push(acc.min(1.0));
    }
    (sorted, cdf)
}

/// Log of the target density `r⁻¹ e^{-r^p} / ℓ(a)`, with `ℓ(a)` from quadrature.
pub fn log_target(x: f64, p: f64, ell_a: f64) -> f64 {
    -x.powf(p) - x.ln() - ell_a.ln()
}

pub fn log_h1(x: f64, a: f64, p: f64) -> f64 {
    p.ln() + (p - 1.0) * x.ln() + a.powf(p) - x.powf(p)
}

pub fn log_h2(x: f64, a: f64, p: f64, beta: f64) -> f64 {
    if x < 1.0 {
        beta.ln() - x.ln() - (1.0 / a).ln().ln()
    } else {
        (1.0 - beta).ln() + p.ln() + (p - 1.0) * x.ln() + 1.0 - x.powf(p)
    }
}

/// Envelope constant written out from its definition.
pub fn log_envelope(a: f64, p: f64, beta: f64, ell_a: f64) -> f64 {
    if a >= 1.0 {
        -(a.powf(p) + p.ln() + ell_a.ln())
    } else {
        let m = (1.0 / (std::f64::consts::E * p * (1.0 - beta))).max((1.0 / a).ln() / beta);
        m.ln() - ell_a.ln()
    }
}

/// Prints one acceptance line and returns whether it passed.
pub fn report(name: &str, passed: bool, detail: &str) -> bool {
    println!("[{}] {name}: {detail}", if passed { "PASS" } else { "FAIL" });
    passed
}

