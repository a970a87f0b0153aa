//! Monte Carlo moment study of bivariate GMGD simulations.
//!
//! For each time `t` on a grid the study compares sample means `m_i(t)`,
//! unbiased sample variances `s_i²(t)` and the sample covariance `s_{12}(t)`
//! with their closed forms, reporting
//!
//! ```text
//! ErrMean_i = |E X_{i,t} - m_i(t)| / t,   ErrVar_i = |Var X_{i,t} - s_i²(t)| / t,
//! ErrCov    = |Cov(X_{1,t}, X_{2,t}) - s_{12}(t)| / t,
//! TotalError = (ΣErrMean_i² + ΣErrVar_i² + ErrCov²)^{1/2}.
//! ```
//!
//! Closed forms are available for `p = 1` with finitely supported Thorin
//! measures: jumps larger than `ε` along atom `s` with mixing point `v`
//! contribute `∫_ε^∞ e^{-rv} dr = e^{-εv}/v` to the mean and
//! `∫_ε^∞ r e^{-rv} dr = (1 + εv) e^{-εv}/v²` to second moments.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::large_jumps::GmgdSpec;
use crate::path::format_number;
use crate::process::{Component, SimulationConfig, Simulator};
use crate::spectral::SpectralMeasure;
use crate::validation::KahanSum;

const CHUNK: usize = 4096;

/// Means, variances and covariance of a bivariate process at one time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyticMoments {
    pub mean: [f64; 2],
    pub var: [f64; 2],
    pub cov: f64,
}

/// Which simulated quantity is compared with which closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StudyTarget {
    /// `X̃^ε` against the large-jump moments.
    LargeJumps,
    /// `εY¹ + X̃^ε + γt` against the moments of the full process.
    FullProcess,
    /// `X̃^ε + γt` (small jumps dropped) against the moments of the full process.
    DropSmallJumps,
}

impl StudyTarget {
    fn moment_epsilon(self, epsilon: f64) -> f64 {
        match self {
            StudyTarget::LargeJumps => epsilon,
            StudyTarget::FullProcess | StudyTarget::DropSmallJumps => 0.0,
        }
    }

    fn with_drift(self) -> bool {
        !matches!(self, StudyTarget::LargeJumps)
    }
}

/// Closed-form moments for the circle study: `σ` uniform on `n` points,
/// `p = 1`, `Q_s = δ₁`, zero drift. `epsilon = 0` gives the full process.
pub fn analytic_moments_study(n: usize, epsilon: f64, t: f64) -> Result<AnalyticMoments> {
    if n == 0 {
        return Err(domain("need n >= 1"));
    }
    if !(epsilon >= 0.0 && t > 0.0) {
        return Err(domain("need epsilon >= 0 and t > 0"));
    }
    let angles = (0..n).map(|i| 2.0 * std::f64::consts::PI * i as f64 / n as f64);
    let nf = n as f64;
    let (mut c, mut s, mut cc, mut ss, mut cs) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for a in angles {
        let (sin, cos) = a.sin_cos();
        c += cos;
        s += sin;
        cc += cos * cos;
        ss += sin * sin;
        cs += cos * sin;
    }
    let first = t * (-epsilon).exp();
    let second = t * (epsilon + 1.0) * (-epsilon).exp();
    Ok(AnalyticMoments {
        mean: [first * c / nf, first * s / nf],
        var: [second * cc / nf, second * ss / nf],
        cov: second * cs / nf,
    })
}

/// Closed-form moments of `X̃^ε_t` (`epsilon > 0`) or of the full process
/// `X_t` (`epsilon = 0`, drift included when `with_drift`) for a bivariate
/// spec with `p = 1`.
pub fn analytic_moments(spec: &GmgdSpec, epsilon: f64, t: f64, with_drift: bool) -> Result<AnalyticMoments> {
    check_study_spec(spec)?;
    if !(epsilon >= 0.0 && t > 0.0) {
        return Err(domain("need epsilon >= 0 and t > 0"));
    }
    let sigma: &SpectralMeasure = spec.spectral();
    let mut mean = [0.0; 2];
    let mut second = [[0.0; 2]; 2];
    for (i, s) in sigma.atoms().iter().enumerate() {
        let w = sigma.weights()[i];
        let (mut m1, mut m2) = (0.0, 0.0);
        for &(v, q) in spec.thorin()[i].points() {
            let decay = (-epsilon * v).exp();
            m1 += q * decay / v;
            m2 += q * (1.0 + epsilon * v) * decay / (v * v);
        }
        for k in 0..2 {
            mean[k] += w * s[k] * m1;
            for l in 0..2 {
                second[k][l] += w * s[k] * s[l] * m2;
            }
        }
    }
    let drift = if with_drift { spec.gamma() } else { &[0.0, 0.0][..] };
    Ok(AnalyticMoments {
        mean: [t * (mean[0] + drift[0]), t * (mean[1] + drift[1])],
        var: [t * second[0][0], t * second[1][1]],
        cov: t * second[0][1],
    })
}

fn check_study_spec(spec: &GmgdSpec) -> Result<()> {
    if spec.dim() != 2 {
        return Err(domain(format!("moment study is bivariate, got dimension {}", spec.dim())));
    }
    if spec.p() != 1.0 {
        return Err(domain(format!("closed-form moments need p = 1, got {}", spec.p())));
    }
    Ok(())
}

/// `count` evenly spaced times in `(0, horizon]`.
pub fn default_time_grid(horizon: f64, count: usize) -> Vec<f64> {
    (1..=count).map(|k| horizon * k as f64 / count as f64).collect()
}

/// Study results at one time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeRow {
    pub t: f64,
    pub analytic: AnalyticMoments,
    pub empirical: AnalyticMoments,
    pub err_mean: [f64; 2],
    pub err_var: [f64; 2],
    pub err_cov: f64,
    pub total_error: f64,
}

impl TimeRow {
    fn new(t: f64, analytic: AnalyticMoments, empirical: AnalyticMoments) -> Self {
        let err = |a: f64, b: f64| (a - b).abs() / t;
        let err_mean = [err(analytic.mean[0], empirical.mean[0]), err(analytic.mean[1], empirical.mean[1])];
        let err_var = [err(analytic.var[0], empirical.var[0]), err(analytic.var[1], empirical.var[1])];
        let err_cov = err(analytic.cov, empirical.cov);
        let total_error = total_error(err_mean, err_var, err_cov);
        Self { t, analytic, empirical, err_mean, err_var, err_cov, total_error }
    }
}

/// Root-sum-square of the five error components.
pub fn total_error(err_mean: [f64; 2], err_var: [f64; 2], err_cov: f64) -> f64 {
    (err_mean[0].powi(2) + err_mean[1].powi(2) + err_var[0].powi(2) + err_var[1].powi(2) + err_cov.powi(2)).sqrt()
}

/// Output of [`moment_study`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub target: StudyTarget,
    pub epsilon: f64,
    pub replications: usize,
    pub seed: u64,
    pub rows: Vec<TimeRow>,
}

impl MomentReport {
    /// Row at time `t`, if `t` is on the grid.
    pub fn at(&self, t: f64) -> Option<&TimeRow> {
        self.rows.iter().find(|r| r.t == t)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(
            w,
            "t,mean1,mean2,var1,var2,cov,m1,m2,s1_sq,s2_sq,s12,err_mean1,err_mean2,err_var1,err_var2,err_cov,total_error"
        )?;
        for r in &self.rows {
            let fields = [
                r.t,
                r.analytic.mean[0],
                r.analytic.mean[1],
                r.analytic.var[0],
                r.analytic.var[1],
                r.analytic.cov,
                r.empirical.mean[0],
                r.empirical.mean[1],
                r.empirical.var[0],
                r.empirical.var[1],
                r.empirical.cov,
                r.err_mean[0],
                r.err_mean[1],
                r.err_var[0],
                r.err_var[1],
                r.err_cov,
                r.total_error,
            ];
            let line: Vec<String> = fields.iter().map(|x| format_number(*x)).collect();
            writeln!(w, "{}", line.join(","))?;
        }
        Ok(())
    }
}

#[derive(Clone, Default)]
struct Accumulator {
    x: [KahanSum; 2],
    xx: [KahanSum; 2],
    xy: KahanSum,
}

impl Accumulator {
    fn add(&mut self, a: f64, b: f64) {
        self.x[0].add(a);
        self.x[1].add(b);
        self.xx[0].add(a * a);
        self.xx[1].add(b * b);
        self.xy.add(a * b);
    }

    fn moments(&self, n: usize) -> AnalyticMoments {
        let nf = n as f64;
        let m = [self.x[0].value() / nf, self.x[1].value() / nf];
        let var = |k: usize| (self.xx[k].value() - nf * m[k] * m[k]) / (nf - 1.0);
        AnalyticMoments {
            mean: m,
            var: [var(0), var(1)],
            cov: (self.xy.value() - nf * m[0] * m[1]) / (nf - 1.0),
        }
    }
}

/// Runs one study over `replications` independent paths.
pub fn moment_study(
    spec: &GmgdSpec,
    config: &SimulationConfig,
    replications: usize,
    times: &[f64],
    target: StudyTarget,
) -> Result<MomentReport> {
    Ok(moment_studies(spec, config, replications, times, &[target])?.remove(0))
}

/// Runs several studies on the same simulated paths (common random numbers),
/// one report per target.
///
/// Path `k` uses substream `k` of `config.seed`; paths are generated in
/// parallel on the current rayon pool and aggregated in index order with
/// compensated sums, so the result does not depend on the thread count.
pub fn moment_studies(
    spec: &GmgdSpec,
    config: &SimulationConfig,
    replications: usize,
    times: &[f64],
    targets: &[StudyTarget],
) -> Result<Vec<MomentReport>> {
    check_study_spec(spec)?;
    if replications < 2 {
        return Err(Error::InsufficientData(format!(
            "sample variances need at least 2 replications, got {replications}"
        )));
    }
    if times.is_empty() || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(domain("study times must be nonempty and strictly increasing"));
    }
    if times[0] <= 0.0 || *times.last().unwrap() > config.horizon {
        return Err(domain(format!("study times must lie in (0, {}]", config.horizon)));
    }
    let sim = Simulator::new(spec, *config)?;
    let analytic: Vec<Vec<AnalyticMoments>> = targets
        .iter()
        .map(|target| {
            times
                .iter()
                .map(|&t| analytic_moments(spec, target.moment_epsilon(config.epsilon), t, target.with_drift()))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    let component = if targets.contains(&StudyTarget::FullProcess) {
        Component::Full
    } else {
        Component::LargeJumps
    };
    let gamma = spec.gamma();
    let mut acc = vec![vec![Accumulator::default(); times.len()]; targets.len()];
    let mut start = 0;
    while start < replications {
        let end = (start + CHUNK).min(replications);
        let samples: Vec<_> = (start..end)
            .into_par_iter()
            .map(|rep| sim.sample_on_grid(rep as u64, times, component))
            .collect();
        for sample in &samples {
            for (target, acc) in targets.iter().zip(acc.iter_mut()) {
                for (k, &t) in times.iter().enumerate() {
                    let value = |i: usize| {
                        let large = sample.large[2 * k + i];
                        match target {
                            StudyTarget::LargeJumps => large,
                            StudyTarget::FullProcess => sample.small[2 * k + i] + large + gamma[i] * t,
                            StudyTarget::DropSmallJumps => large + gamma[i] * t,
                        }
                    };
                    acc[k].add(value(0), value(1));
                }
            }
        }
        start = end;
    }

    Ok(targets
        .iter()
        .zip(acc)
        .zip(analytic)
        .map(|((&target, acc), analytic)| MomentReport {
            target,
            epsilon: config.epsilon,
            replications,
            seed: config.seed,
            rows: times
                .iter()
                .zip(acc)
                .zip(analytic)
                .map(|((&t, acc), a)| TimeRow::new(t, a, acc.moments(replications)))
                .collect(),
        })
        .collect())
}
