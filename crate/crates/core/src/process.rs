//! The assembled approximation `X ≈ εY¹ + X̃^ε + γt` of a GMGD Lévy process.
//!
//! `X̃^ε` (jumps larger than `ε`) is simulated exactly; `εY¹` replaces the
//! jumps smaller than `ε` by a scaled Dickman process with the same spectral
//! measure. The two parts draw from separate substreams of the run seed.

use rand::Rng;
use rand_distr::{Distribution, Open01};
use serde::{Deserialize, Serialize};

use crate::dickman::{DickmanSpec, DEFAULT_TRUNCATION};
use crate::error::{domain, Result};
use crate::large_jumps::{GmgdSpec, LargeJumpLaw, DEFAULT_BETA};
use crate::path::PathSkeleton;
use crate::rng::{Purpose, Substreams};

/// Knobs of a simulation run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub epsilon: f64,
    pub horizon: f64,
    pub shot_noise_k: usize,
    pub beta: f64,
    pub seed: u64,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            epsilon: 0.1,
            horizon: 1.0,
            shot_noise_k: DEFAULT_TRUNCATION,
            beta: DEFAULT_BETA,
            seed: 0,
        }
    }
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(domain(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(domain(format!("horizon must be positive, got {}", self.horizon)));
        }
        if self.shot_noise_k == 0 {
            return Err(domain("shot-noise truncation must be at least 1"));
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(domain(format!("beta must lie in (0, 1), got {}", self.beta)));
        }
        Ok(())
    }
}

/// Which parts of the decomposition to simulate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Component {
    /// `εY¹ + X̃^ε + γt`.
    Full,
    /// `X̃^ε` only.
    LargeJumps,
    /// `εY¹` only.
    SmallJumps,
}

impl Component {
    fn has_small(self) -> bool {
        matches!(self, Component::Full | Component::SmallJumps)
    }

    fn has_large(self) -> bool {
        matches!(self, Component::Full | Component::LargeJumps)
    }
}

/// A spec prepared for repeated simulation at a fixed configuration.
#[derive(Debug, Clone)]
pub struct Simulator {
    spec: GmgdSpec,
    config: SimulationConfig,
    dickman: DickmanSpec,
    large: LargeJumpLaw,
    streams: Substreams,
}

impl Simulator {
    pub fn new(spec: &GmgdSpec, config: SimulationConfig) -> Result<Self> {
        config.validate()?;
        let dickman = DickmanSpec::new(spec.spectral().clone(), config.epsilon)?;
        let large = LargeJumpLaw::new(spec, config.epsilon)?;
        Ok(Self {
            spec: spec.clone(),
            config,
            dickman,
            large,
            streams: Substreams::new(config.seed),
        })
    }

    pub fn spec(&self) -> &GmgdSpec {
        &self.spec
    }

    pub fn config(&self) -> &SimulationConfig {
        &self.config
    }

    pub fn large_jump_law(&self) -> &LargeJumpLaw {
        &self.large
    }

    pub fn dickman(&self) -> &DickmanSpec {
        &self.dickman
    }

    /// Path number `replication` of the run.
    pub fn sample_path(&self, replication: u64, component: Component) -> Result<PathSkeleton> {
        let mut small_rng = self.streams.stream(Purpose::Dickman, replication);
        let mut large_rng = self.streams.stream(Purpose::LargeJumps, replication);
        self.sample_path_with(component, &mut small_rng, &mut large_rng)
    }

    /// Builds a path from caller-provided streams. Small jumps precede large
    /// jumps at equal times.
    pub fn sample_path_with<R1: Rng, R2: Rng>(
        &self,
        component: Component,
        small_rng: &mut R1,
        large_rng: &mut R2,
    ) -> Result<PathSkeleton> {
        let horizon = self.config.horizon;
        let drift = if component == Component::Full {
            self.spec.gamma().to_vec()
        } else {
            vec![0.0; self.spec.dim()]
        };
        let mut path = PathSkeleton::new(horizon, drift)?;
        let d = self.spec.dim();
        if component.has_small() {
            let mut jump = vec![0.0; d];
            self.dickman
                .for_each_shot(horizon, self.config.shot_noise_k, small_rng, |t, r, s| {
                    for (j, x) in jump.iter_mut().zip(s) {
                        *j = r * x;
                    }
                    path.push_jump_unsorted(t, &jump);
                });
        }
        if component.has_large() {
            self.large
                .for_each_jump(horizon, self.config.beta, large_rng, |t, j| path.push_jump_unsorted(t, j));
        }
        path.sort_jumps();
        Ok(path)
    }

    /// Values of path `replication` at sorted `times`, split into the small-jump
    /// part `εY¹` and the large-jump part `X̃^ε` (drift excluded). Each output
    /// is laid out as `times.len()` rows of `d` values; a part not selected by
    /// `component` is left at zero and its stream is not consumed.
    pub fn sample_on_grid(&self, replication: u64, times: &[f64], component: Component) -> GridSample {
        let d = self.spec.dim();
        let mut small = vec![0.0; times.len() * d];
        let mut large = vec![0.0; times.len() * d];
        let mut small_rng = self.streams.stream(Purpose::Dickman, replication);
        let mut large_rng = self.streams.stream(Purpose::LargeJumps, replication);
        let horizon = self.config.horizon;
        if component.has_small() {
            self.dickman
                .for_each_shot(horizon, self.config.shot_noise_k, &mut small_rng, |t, r, s| {
                    add_to_bucket(&mut small, times, d, t, s.iter().map(|x| r * x));
                });
        }
        if component.has_large() {
            self.large
                .for_each_jump(horizon, self.config.beta, &mut large_rng, |t, j| {
                    add_to_bucket(&mut large, times, d, t, j.iter().copied());
                });
        }
        prefix_sum_rows(&mut small, d);
        prefix_sum_rows(&mut large, d);
        GridSample { small, large }
    }
}

/// Per-path values on a time grid, see [`Simulator::sample_on_grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridSample {
    pub small: Vec<f64>,
    pub large: Vec<f64>,
}

fn add_to_bucket(buckets: &mut [f64], times: &[f64], d: usize, t: f64, jump: impl Iterator<Item = f64>) {
    let k = times.partition_point(|&g| g < t);
    if k < times.len() {
        for (b, x) in buckets[k * d..(k + 1) * d].iter_mut().zip(jump) {
            *b += x;
        }
    }
}

fn prefix_sum_rows(rows: &mut [f64], d: usize) {
    for k in 1..rows.len() / d {
        for i in 0..d {
            rows[k * d + i] += rows[(k - 1) * d + i];
        }
    }
}

/// One approximate path of the GMGD process, `εY¹ + X̃^ε + γt` on `[0, T]`,
/// using replication 0 of the configured seed.
pub fn sample_path(spec: &GmgdSpec, config: SimulationConfig) -> Result<PathSkeleton> {
    Simulator::new(spec, config)?.sample_path(0, Component::Full)
}

/// Path values at sorted times, `X_t = drift·t + Σ_{t_i ≤ t} j_i`.
pub fn evaluate_path(path: &PathSkeleton, times: &[f64]) -> Result<Vec<Vec<f64>>> {
    path.evaluate(times)
}

/// Samples `X^ε_T`, the sum of the jumps of size at most `ε` of the exact
/// GMGD process on `[0, T]`, by thinning the `ε`-Dickman shot noise: a
/// Dickman jump of size `r` along atom `s` is kept with probability
/// `q(r^p, s)`. Every series term consumes one extra uniform, so calls with
/// the same stream at different `ε` are coupled.
pub fn sample_small_jump_marginal<R: Rng>(
    spec: &GmgdSpec,
    epsilon: f64,
    horizon: f64,
    truncation: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if !(horizon.is_finite() && horizon > 0.0) || truncation == 0 {
        return Err(domain("need positive horizon and truncation"));
    }
    let sigma = spec.spectral();
    let d = spec.dim();
    let mut out = vec![0.0; d];
    if sigma.is_zero() {
        return Ok(out);
    }
    let arrivals = rand_distr::Exp::new(sigma.total_mass()).expect("positive mass");
    let mut gamma = 0.0;
    for _ in 0..truncation {
        gamma += arrivals.sample(rng);
        let magnitude = epsilon * (-gamma / horizon).exp();
        if magnitude == 0.0 {
            break;
        }
        let atom = sigma.sample_index_unchecked(rng);
        let keep: f64 = Open01.sample(rng);
        if keep <= spec.tempering(atom, magnitude) {
            for (o, s) in out.iter_mut().zip(sigma.atom(atom)) {
                *o += magnitude * s;
            }
        }
    }
    Ok(out)
}
