//! Kolmogorov–Smirnov and chi-square goodness-of-fit tests.

use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{domain, Error, Result};

/// Smallest sample accepted by the KS tests.
pub const MIN_KS_POINTS: usize = 100;

/// Result of a goodness-of-fit test at a fixed significance level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GofOutcome {
    pub statistic: f64,
    /// Rejection threshold on the scale of `statistic`.
    pub critical: f64,
    pub p_value: f64,
    pub passed: bool,
}

/// `P(K > x)` for the Kolmogorov distribution.
pub fn kolmogorov_survival(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x < 1.0 {
        // P(K ≤ x) = √(2π)/x Σ_{k≥1} exp(-(2k-1)²π²/(8x²))
        let pi2 = std::f64::consts::PI.powi(2);
        let cdf: f64 = (1..=20)
            .map(|k| {
                let m = (2 * k - 1) as f64;
                (-m * m * pi2 / (8.0 * x * x)).exp()
            })
            .sum::<f64>()
            * (2.0 * std::f64::consts::PI).sqrt()
            / x;
        return (1.0 - cdf).clamp(0.0, 1.0);
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * x * x).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-18 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Asymptotic critical value `c_α` with `P(K > c_α) = α`.
pub fn ks_critical_value(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(domain(format!("significance must lie in (0, 1), got {alpha}")));
    }
    let (mut lo, mut hi) = (0.1, 10.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if kolmogorov_survival(mid) > alpha {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn sorted_copy(sample: &[f64]) -> Result<Vec<f64>> {
    if sample.len() < MIN_KS_POINTS {
        return Err(Error::InsufficientData(format!(
            "KS test needs at least {MIN_KS_POINTS} points, got {}",
            sample.len()
        )));
    }
    if sample.iter().any(|x| x.is_nan()) {
        return Err(domain("sample contains NaN"));
    }
    let mut v = sample.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

fn outcome(statistic: f64, effective_n: f64, alpha: f64) -> Result<GofOutcome> {
    let c = ks_critical_value(alpha)?;
    let p_value = kolmogorov_survival(statistic * effective_n.sqrt());
    let critical = c / effective_n.sqrt();
    Ok(GofOutcome { statistic, critical, p_value, passed: statistic <= critical })
}

/// One-sample KS test of `sample` against a continuous `cdf`.
pub fn ks_one_sample<F: FnMut(f64) -> f64>(sample: &[f64], mut cdf: F, alpha: f64) -> Result<GofOutcome> {
    let sorted = sorted_copy(sample)?;
    let n = sorted.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    outcome(d, n, alpha)
}

/// One-sample KS test where the reference CDF values at the sorted sample
/// points are supplied directly (useful when the CDF is built by cumulative
/// quadrature along the sorted sample).
pub fn ks_one_sample_sorted(sorted_cdf_values: &[f64], alpha: f64) -> Result<GofOutcome> {
    if sorted_cdf_values.len() < MIN_KS_POINTS {
        return Err(Error::InsufficientData("too few CDF values".into()));
    }
    let n = sorted_cdf_values.len() as f64;
    let d = sorted_cdf_values
        .iter()
        .enumerate()
        .fold(0.0f64, |d, (i, &f)| d.max(f - i as f64 / n).max((i + 1) as f64 / n - f));
    outcome(d, n, alpha)
}

/// Two-sample KS test.
pub fn ks_two_sample(a: &[f64], b: &[f64], alpha: f64) -> Result<GofOutcome> {
    let a = sorted_copy(a)?;
    let b = sorted_copy(b)?;
    let (n, m) = (a.len(), b.len());
    let (mut i, mut j) = (0, 0);
    let mut d = 0.0f64;
    while i < n && j < m {
        let x = a[i].min(b[j]);
        while i < n && a[i] <= x {
            i += 1;
        }
        while j < m && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let effective = (n * m) as f64 / (n + m) as f64;
    outcome(d, effective, alpha)
}

/// Pearson chi-square test of observed counts against cell probabilities.
pub fn chi_square_test(counts: &[u64], probabilities: &[f64], alpha: f64) -> Result<GofOutcome> {
    if counts.len() != probabilities.len() || counts.is_empty() {
        return Err(domain("counts and probabilities must be nonempty and of equal length"));
    }
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(Error::InsufficientData("no observations".into()));
    }
    let n = total as f64;
    let statistic: f64 = counts
        .iter()
        .zip(probabilities)
        .map(|(&c, &p)| {
            let e = n * p;
            (c as f64 - e).powi(2) / e
        })
        .sum();
    let df = counts.len() - 1;
    if df == 0 {
        return Ok(GofOutcome { statistic, critical: f64::INFINITY, p_value: 1.0, passed: true });
    }
    let dist = ChiSquared::new(df as f64).map_err(|e| domain(e.to_string()))?;
    let p_value = dist.sf(statistic);
    let critical = dist.inverse_cdf(1.0 - alpha);
    Ok(GofOutcome { statistic, critical, p_value, passed: p_value > alpha })
}
