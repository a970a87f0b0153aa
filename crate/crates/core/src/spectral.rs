//! Finite spectral measures on the unit sphere `S^{d-1}`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, invalid, Error, Result};

const UNIT_TOL: f64 = 1e-12;

/// Anything that can hand out jump directions drawn from `σ/θ`.
///
/// [`SpectralMeasure`] is the native implementation. [`CustomSpectral`]
/// wraps a caller-supplied sampler for measures without atoms.
pub trait DirectionSource {
    fn dim(&self) -> usize;

    /// Total mass `θ = σ(S^{d-1})`.
    fn total_mass(&self) -> f64;

    /// Writes a direction drawn from `σ/θ` into `out` (length `dim()`).
    fn sample_direction_into<R: Rng>(&self, rng: &mut R, out: &mut [f64]);
}

/// A finite discrete measure `σ = Σ w_i δ_{s_i}` on the unit sphere.
///
/// The zero measure is a distinct, valid value (see [`SpectralMeasure::zero`]);
/// processes built on it are identically zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpectralRepr", into = "SpectralRepr")]
pub struct SpectralMeasure {
    dim: usize,
    atoms: Vec<Vec<f64>>,
    weights: Vec<f64>,
    cumulative: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct SpectralRepr {
    d: usize,
    atoms: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl TryFrom<SpectralRepr> for SpectralMeasure {
    type Error = Error;

    fn try_from(r: SpectralRepr) -> Result<Self> {
        if r.atoms.is_empty() && r.weights.is_empty() {
            return SpectralMeasure::zero(r.d);
        }
        SpectralMeasure::new(r.d, r.atoms, r.weights)
    }
}

impl From<SpectralMeasure> for SpectralRepr {
    fn from(m: SpectralMeasure) -> Self {
        SpectralRepr { d: m.dim, atoms: m.atoms, weights: m.weights }
    }
}

impl SpectralMeasure {
    /// Builds a nonzero measure from unit-vector atoms and positive weights.
    pub fn new(dim: usize, atoms: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("dimension must be at least 1"));
        }
        if atoms.is_empty() {
            return Err(invalid("a nonzero spectral measure needs at least one atom; use SpectralMeasure::zero"));
        }
        if atoms.len() != weights.len() {
            return Err(invalid(format!(
                "{} atoms but {} weights",
                atoms.len(),
                weights.len()
            )));
        }
        for (i, s) in atoms.iter().enumerate() {
            if s.len() != dim {
                return Err(invalid(format!("atom {i} has length {}, expected {dim}", s.len())));
            }
            let norm = s.iter().map(|x| x * x).sum::<f64>().sqrt();
            if !norm.is_finite() || (norm - 1.0).abs() > UNIT_TOL {
                return Err(invalid(format!("atom {i} is not a unit vector (norm {norm})")));
            }
        }
        for (i, &w) in weights.iter().enumerate() {
            if !(w.is_finite() && w > 0.0) {
                return Err(invalid(format!("weight {i} must be finite and positive, got {w}")));
            }
        }
        for i in 0..atoms.len() {
            for j in 0..i {
                let same = atoms[i]
                    .iter()
                    .zip(&atoms[j])
                    .all(|(a, b)| (a - b).abs() <= UNIT_TOL);
                if same {
                    return Err(invalid(format!("atoms {j} and {i} coincide")));
                }
            }
        }
        let cumulative = weights
            .iter()
            .scan(0.0, |acc, w| {
                *acc += w;
                Some(*acc)
            })
            .collect();
        Ok(Self { dim, atoms, weights, cumulative })
    }

    /// The zero measure on `S^{d-1}`.
    pub fn zero(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("dimension must be at least 1"));
        }
        Ok(Self { dim, atoms: Vec::new(), weights: Vec::new(), cumulative: Vec::new() })
    }

    /// Discrete uniform probability measure on `n` evenly spaced points of
    /// the unit circle, at angles `2π(i-1)/n`.
    pub fn uniform_circle(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(domain("uniform_circle needs n >= 1"));
        }
        let atoms = (0..n)
            .map(|i| {
                let angle = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
                vec![angle.cos(), angle.sin()]
            })
            .collect();
        Self::new(2, atoms, vec![1.0 / n as f64; n])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atoms(&self) -> &[Vec<f64>] {
        &self.atoms
    }

    pub fn atom(&self, i: usize) -> &[f64] {
        &self.atoms[i]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_mass(&self) -> f64 {
        self.cumulative.last().copied().unwrap_or(0.0)
    }

    /// `σ(C)` for a set of atom indices.
    pub fn mass_of(&self, atoms: &AtomSet) -> f64 {
        match atoms {
            AtomSet::All => self.total_mass(),
            AtomSet::Indices(idx) => idx.iter().map(|&i| self.weights[i]).sum(),
        }
    }

    /// Draws an atom index with probability `w_i / θ`.
    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<usize> {
        if self.is_zero() {
            return Err(domain("cannot sample a direction from the zero measure"));
        }
        Ok(self.sample_index_unchecked(rng))
    }

    pub(crate) fn sample_index_unchecked<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        if self.cumulative.len() == 1 {
            return 0;
        }
        let target = rng.random::<f64>() * self.total_mass();
        let i = self.cumulative.partition_point(|&c| c <= target);
        i.min(self.cumulative.len() - 1)
    }

    pub fn sample_direction<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<&[f64]> {
        let i = self.sample_index(rng)?;
        Ok(&self.atoms[i])
    }

    /// Index of the atom equal to `direction` (within unit tolerance), if any.
    pub fn find_atom(&self, direction: &[f64]) -> Option<usize> {
        self.atoms.iter().position(|s| {
            s.iter().zip(direction).all(|(a, b)| (a - b).abs() <= 1e-9)
        })
    }
}

impl DirectionSource for SpectralMeasure {
    fn dim(&self) -> usize {
        self.dim
    }

    fn total_mass(&self) -> f64 {
        SpectralMeasure::total_mass(self)
    }

    fn sample_direction_into<R: Rng>(&self, rng: &mut R, out: &mut [f64]) {
        let i = self.sample_index_unchecked(rng);
        out.copy_from_slice(&self.atoms[i]);
    }
}

/// A subset `C` of the atoms of a discrete spectral measure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AtomSet {
    All,
    Indices(Vec<usize>),
}

impl AtomSet {
    pub fn none() -> Self {
        AtomSet::Indices(Vec::new())
    }

    pub fn contains(&self, i: usize) -> bool {
        match self {
            AtomSet::All => true,
            AtomSet::Indices(idx) => idx.contains(&i),
        }
    }

    pub fn validate(&self, measure: &SpectralMeasure) -> Result<()> {
        if let AtomSet::Indices(idx) = self {
            if let Some(&bad) = idx.iter().find(|&&i| i >= measure.len()) {
                return Err(domain(format!(
                    "atom index {bad} out of range for a measure with {} atoms",
                    measure.len()
                )));
            }
        }
        Ok(())
    }
}

/// A spectral measure known only through a direction sampler and its mass.
///
/// Useful for Dickman sampling with a continuous `σ`; not accepted where
/// atom-wise closed forms are needed.
pub struct CustomSpectral<F> {
    dim: usize,
    total_mass: f64,
    sampler: F,
}

impl<F> CustomSpectral<F>
where
    F: Fn(&mut dyn rand::RngCore, &mut [f64]),
{
    pub fn new(dim: usize, total_mass: f64, sampler: F) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("dimension must be at least 1"));
        }
        if !(total_mass.is_finite() && total_mass >= 0.0) {
            return Err(invalid(format!("total mass must be finite and nonnegative, got {total_mass}")));
        }
        Ok(Self { dim, total_mass, sampler })
    }
}

impl<F> DirectionSource for CustomSpectral<F>
where
    F: Fn(&mut dyn rand::RngCore, &mut [f64]),
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn total_mass(&self) -> f64 {
        self.total_mass
    }

    fn sample_direction_into<R: Rng>(&self, rng: &mut R, out: &mut [f64]) {
        (self.sampler)(rng, out)
    }
}
