//! Simulation of general multivariate gamma (GMGD) Lévy processes.
//!
//! A GMGD process is split at a jump-size threshold `ε`. Jumps larger than
//! `ε` form a compound Poisson process that is sampled exactly; jumps smaller
//! than `ε` are replaced by `ε` times a multivariate Dickman Lévy process,
//! which is sampled from its shot-noise series. The crate is organised as:
//!
//! - [`special`]: the tail integral `ℓ(u) = ∫_u^∞ r⁻¹ e^{-r^p} dr` and `Γ(0, x)`.
//! - [`spectral`]: discrete spectral measures on the unit sphere.
//! - [`dickman`]: multivariate ε-Dickman marginals and paths.
//! - [`large_jumps`]: the large-jump law and its rejection samplers.
//! - [`process`]: the assembled approximate process.
//! - [`validation`]: analytic moments, Monte Carlo error studies and
//!   goodness-of-fit utilities.

pub mod dickman;
mod error;
pub mod large_jumps;
pub mod path;
pub mod process;
pub mod rng;
pub mod special;
pub mod spectral;
pub mod validation;

pub use dickman::DickmanSpec;
pub use error::{Error, Result};
pub use large_jumps::{GmgdSpec, LargeJumpLaw, RadialLaw, ThorinMeasure};
pub use path::PathSkeleton;
pub use process::SimulationConfig;
pub use spectral::{DirectionSource, SpectralMeasure};
