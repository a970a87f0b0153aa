//! Multivariate ε-Dickman laws and their Lévy processes.
//!
//! `MD^ε(σ)` is the infinitely divisible law with Lévy measure
//! `D^ε(dr, ds) = 1_{(0,ε]}(r) r⁻¹ dr σ(ds)`, equivalently the fixed point of
//! `X = U^{1/θ}(X + εξ)`. Paths are generated from the shot-noise series
//!
//! ```text
//! Y_t = Σ_i ε e^{-Γ_i/T} ξ_i 1{T·U_i ≤ t},   t ∈ [0, T],
//! ```
//!
//! where `Γ_i` are the arrival times of a rate-`θ` Poisson process, `U_i` are
//! uniform and `ξ_i ~ σ/θ`. The series is cut at `K` terms; terms whose
//! magnitude underflows to zero end the series early without changing its
//! value.

use rand::Rng;
use rand_distr::{Distribution, Exp, Open01};

use crate::error::{domain, Result};
use crate::path::PathSkeleton;
use crate::spectral::{AtomSet, DirectionSource, SpectralMeasure};

/// Series truncation used when the caller does not choose one.
pub const DEFAULT_TRUNCATION: usize = 10_000;

/// Parameters `(σ, ε)` of `MD^ε(σ)`.
#[derive(Debug, Clone)]
pub struct DickmanSpec<S = SpectralMeasure> {
    spectral: S,
    epsilon: f64,
}

impl<S: DirectionSource> DickmanSpec<S> {
    pub fn new(spectral: S, epsilon: f64) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(domain(format!("epsilon must be finite and positive, got {epsilon}")));
        }
        Ok(Self { spectral, epsilon })
    }

    pub fn spectral(&self) -> &S {
        &self.spectral
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn dim(&self) -> usize {
        self.spectral.dim()
    }

    /// Same spectral measure, maximum jump size `ε / γ`. Samples of
    /// `MD^ε(σ) / γ` and `MD^{ε/γ}(σ)` agree in law.
    pub fn rescaled(&self, gamma: f64) -> Result<Self>
    where
        S: Clone,
    {
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(domain(format!("scale factor must be positive, got {gamma}")));
        }
        Self::new(self.spectral.clone(), self.epsilon / gamma)
    }

    /// Runs the truncated shot-noise series on `[0, horizon]`, calling
    /// `emit(time, magnitude, direction)` for every nonzero term in order of
    /// generation. Magnitudes are strictly below `ε`.
    pub(crate) fn for_each_shot<R, F>(&self, horizon: f64, truncation: usize, rng: &mut R, mut emit: F)
    where
        R: Rng,
        F: FnMut(f64, f64, &[f64]),
    {
        let theta = self.spectral.total_mass();
        if theta <= 0.0 {
            return;
        }
        let arrivals = Exp::new(theta).expect("positive rate");
        let mut direction = vec![0.0; self.dim()];
        let mut gamma = 0.0;
        for _ in 0..truncation {
            gamma += arrivals.sample(rng);
            let magnitude = self.epsilon * (-gamma / horizon).exp();
            if magnitude == 0.0 {
                break;
            }
            let u: f64 = Open01.sample(rng);
            self.spectral.sample_direction_into(rng, &mut direction);
            emit(horizon * u, magnitude, &direction);
        }
    }

    /// Samples a path of the Lévy process with `Y_1 ~ MD^ε(σ)` on `[0, horizon]`.
    pub fn sample_path<R: Rng>(&self, horizon: f64, truncation: usize, rng: &mut R) -> Result<PathSkeleton> {
        check_run(horizon, truncation)?;
        let d = self.dim();
        let mut path = PathSkeleton::new(horizon, vec![0.0; d])?;
        let mut jump = vec![0.0; d];
        self.for_each_shot(horizon, truncation, rng, |t, r, s| {
            for (j, x) in jump.iter_mut().zip(s) {
                *j = r * x;
            }
            path.push_jump_unsorted(t, &jump);
        });
        path.sort_jumps();
        Ok(path)
    }

    /// Samples `X ~ MD^ε(σ)` as the truncated series `Σ_{i≤K} ε e^{-Γ_i} ξ_i`.
    pub fn sample_marginal<R: Rng>(&self, truncation: usize, rng: &mut R) -> Result<Vec<f64>> {
        check_run(1.0, truncation)?;
        let mut out = vec![0.0; self.dim()];
        self.accumulate_marginal(1.0, truncation, rng, &mut out);
        Ok(out)
    }

    /// Adds the value at `horizon` of a fresh path to `out`.
    pub(crate) fn accumulate_marginal<R: Rng>(&self, horizon: f64, truncation: usize, rng: &mut R, out: &mut [f64]) {
        self.for_each_shot(horizon, truncation, rng, |_, r, s| {
            for (o, x) in out.iter_mut().zip(s) {
                *o += r * x;
            }
        });
    }
}

impl DickmanSpec<SpectralMeasure> {
    /// `D^ε((a, b]·C)`, the expected number of jumps per unit time with
    /// magnitude in `(a, b]` and direction in `C`.
    pub fn levy_mass(&self, a: f64, b: f64, sector: &AtomSet) -> Result<f64> {
        if !(a >= 0.0 && a < b) {
            return Err(domain(format!("need 0 <= a < b, got a = {a}, b = {b}")));
        }
        sector.validate(&self.spectral)?;
        let mass = self.spectral.mass_of(sector);
        if a >= self.epsilon || mass == 0.0 {
            return Ok(0.0);
        }
        let hi = b.min(self.epsilon);
        Ok(mass * (hi.ln() - a.ln()))
    }
}

fn check_run(horizon: f64, truncation: usize) -> Result<()> {
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(domain(format!("horizon must be finite and positive, got {horizon}")));
    }
    if truncation == 0 {
        return Err(domain("series truncation must be at least 1"));
    }
    Ok(())
}
