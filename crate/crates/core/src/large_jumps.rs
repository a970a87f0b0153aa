//! Exact sampling of the large jumps of a GMGD Lévy process.
//!
//! A GMGD law has Lévy measure `ν(dr, ds) = q(r^p, s) r⁻¹ dr σ(ds)` with
//! `q(r^p, s) = ∫ e^{-r^p v} Q_s(dv)`. Restricted to jumps larger than `ε`
//! it is a finite measure of mass `λ^ε`, and a normalized jump is built as
//! `W = R V^{-1/p} S` where
//!
//! - `S ~ σ_p(ds) ∝ k_ε(s) σ(ds)`, `k_ε(s) = ∫ ℓ(ε v^{1/p}) Q_s(dv)`,
//! - `V | S ~ G_V(dv; S) ∝ ℓ(ε v^{1/p}) Q_S(dv)`,
//! - `R | S, V ~ G_R(·; ε V^{1/p})` with density `r⁻¹ e^{-r^p} / ℓ(a)` on `[a, ∞)`.
//!
//! `G_R` is sampled by rejection: from a shifted Weibull-type proposal when
//! `a ≥ 1`, and from a log-uniform/Weibull mixture when `a < 1` (see
//! [`RadialLaw`]). Thorin measures `Q_s` are restricted to finite support.

use rand::Rng;
use rand_distr::{Distribution, Open01, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{domain, invalid, Error, Result};
use crate::path::PathSkeleton;
use crate::special::ell;
use crate::spectral::SpectralMeasure;

/// Default mixture weight of the log-uniform part of the `a < 1` proposal.
pub const DEFAULT_BETA: f64 = 0.5;

const PROBABILITY_TOL: f64 = 1e-12;
const NEGLIGIBLE_WEIGHT: f64 = 1e-300;

/// A finitely supported probability measure `Q = Σ q_j δ_{v_j}` on `(0, ∞)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(f64, f64)>", into = "Vec<(f64, f64)>")]
pub struct ThorinMeasure {
    points: Vec<(f64, f64)>,
}

impl TryFrom<Vec<(f64, f64)>> for ThorinMeasure {
    type Error = Error;

    fn try_from(points: Vec<(f64, f64)>) -> Result<Self> {
        ThorinMeasure::new(points)
    }
}

impl From<ThorinMeasure> for Vec<(f64, f64)> {
    fn from(q: ThorinMeasure) -> Self {
        q.points
    }
}

impl ThorinMeasure {
    /// Builds `Σ q_j δ_{v_j}` from `(v_j, q_j)` pairs.
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(invalid("Thorin measure needs at least one support point"));
        }
        for &(v, q) in &points {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(format!("Thorin support point must be positive, got {v}")));
            }
            if !(q.is_finite() && q > 0.0) {
                return Err(invalid(format!("Thorin weight must be positive, got {q}")));
            }
        }
        let total: f64 = points.iter().map(|(_, q)| q).sum();
        if (total - 1.0).abs() > PROBABILITY_TOL {
            return Err(invalid(format!("Thorin weights sum to {total}, expected 1")));
        }
        Ok(Self { points })
    }

    /// The point mass `δ_v`.
    pub fn dirac(v: f64) -> Result<Self> {
        Self::new(vec![(v, 1.0)])
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }
}

/// Parameters of a general multivariate gamma distribution `ID₀(ν, γ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GmgdRepr", into = "GmgdRepr")]
pub struct GmgdSpec {
    p: f64,
    gamma: Vec<f64>,
    spectral: SpectralMeasure,
    thorin: Vec<ThorinMeasure>,
}

#[derive(Serialize, Deserialize)]
struct GmgdRepr {
    d: usize,
    p: f64,
    gamma: Vec<f64>,
    spectral: SpectralMeasure,
    thorin: Vec<ThorinMeasure>,
}

impl TryFrom<GmgdRepr> for GmgdSpec {
    type Error = Error;

    fn try_from(r: GmgdRepr) -> Result<Self> {
        if r.d != r.spectral.dim() {
            return Err(invalid(format!(
                "spec dimension {} disagrees with spectral dimension {}",
                r.d,
                r.spectral.dim()
            )));
        }
        GmgdSpec::new(r.p, r.gamma, r.spectral, r.thorin)
    }
}

impl From<GmgdSpec> for GmgdRepr {
    fn from(s: GmgdSpec) -> Self {
        GmgdRepr { d: s.spectral.dim(), p: s.p, gamma: s.gamma, spectral: s.spectral, thorin: s.thorin }
    }
}

impl GmgdSpec {
    /// `thorin[i]` is the mixing measure attached to atom `i` of `spectral`.
    pub fn new(p: f64, gamma: Vec<f64>, spectral: SpectralMeasure, thorin: Vec<ThorinMeasure>) -> Result<Self> {
        if !(p.is_finite() && p > 0.0) {
            return Err(invalid(format!("p must be finite and positive, got {p}")));
        }
        if gamma.len() != spectral.dim() {
            return Err(invalid(format!(
                "drift has length {}, expected {}",
                gamma.len(),
                spectral.dim()
            )));
        }
        if gamma.iter().any(|g| !g.is_finite()) {
            return Err(invalid("drift must be finite"));
        }
        if thorin.len() != spectral.len() {
            return Err(invalid(format!(
                "{} Thorin measures for {} spectral atoms",
                thorin.len(),
                spectral.len()
            )));
        }
        Ok(Self { p, gamma, spectral, thorin })
    }

    /// The bivariate study configuration: `σ` uniform on `n` points of the
    /// circle, `p = 1`, `Q_s = δ₁`, zero drift.
    pub fn circle_study(n: usize) -> Result<Self> {
        let spectral = SpectralMeasure::uniform_circle(n)?;
        let thorin = vec![ThorinMeasure::dirac(1.0)?; n];
        Self::new(1.0, vec![0.0; 2], spectral, thorin)
    }

    pub fn dim(&self) -> usize {
        self.spectral.dim()
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    pub fn spectral(&self) -> &SpectralMeasure {
        &self.spectral
    }

    pub fn thorin(&self) -> &[ThorinMeasure] {
        &self.thorin
    }

    /// `k_ε(s_i) = Σ_j q_j ℓ(ε v_j^{1/p})`, the large-jump intensity along atom `i`.
    pub fn k_epsilon(&self, atom: usize, epsilon: f64) -> Result<f64> {
        check_epsilon(epsilon)?;
        let q = self
            .thorin
            .get(atom)
            .ok_or_else(|| domain(format!("atom index {atom} out of range")))?;
        q.points
            .iter()
            .map(|&(v, w)| Ok(w * ell(epsilon * v.powf(1.0 / self.p), self.p)?))
            .sum()
    }

    /// `q(r^p, s_i) = Σ_j q_j e^{-r^p v_j}`.
    pub fn tempering(&self, atom: usize, r: f64) -> f64 {
        let rp = r.powf(self.p);
        self.thorin[atom]
            .points
            .iter()
            .map(|&(v, w)| w * (-rp * v).exp())
            .sum()
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(domain(format!("epsilon must be finite and positive, got {epsilon}")));
    }
    Ok(())
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(domain(format!("beta must lie in (0, 1), got {beta}")));
    }
    Ok(())
}

fn uniform<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    Open01.sample(rng)
}

/// `G_R(·; a)`: density `r⁻¹ e^{-r^p} / ℓ(a)` on `[a, ∞)`, with its
/// rejection samplers.
///
/// For `a ≥ 1` the proposal is `h₁(x) = p x^{p-1} e^{a^p - x^p}` and the
/// accept test runs on the `p`-power scale `y = x^p`, accepting with
/// probability `1/y`. For `a < 1` the proposal is the mixture `h₂` (weight
/// `β` on a log-uniform law over `[a, 1)`, weight `1 - β` on `h₁(·; 1, p)`),
/// accepted with probability `φ₂(x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialLaw {
    a: f64,
    p: f64,
    ell_a: f64,
}

impl RadialLaw {
    pub fn new(a: f64, p: f64) -> Result<Self> {
        if !(a.is_finite() && a > 0.0) {
            return Err(domain(format!("radial lower bound a must be finite and positive, got {a}")));
        }
        let ell_a = ell(a, p)?;
        Ok(Self { a, p, ell_a })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// `ℓ(a)`, the normalizing constant of the target density.
    pub fn ell_a(&self) -> f64 {
        self.ell_a
    }

    /// Whether the `a ≥ 1` sampler is used.
    pub fn uses_shifted_proposal(&self) -> bool {
        self.a >= 1.0
    }

    pub fn density(&self, x: f64) -> f64 {
        if x < self.a {
            return 0.0;
        }
        (-x.powf(self.p)).exp() / (x * self.ell_a)
    }

    pub fn h1(&self, x: f64) -> f64 {
        h1_density(x, self.a, self.p)
    }

    pub fn h2(&self, x: f64, beta: f64) -> f64 {
        h2_density(x, self.a, self.p, beta)
    }

    /// `max{1/(e p (1-β)), log(1/a)/β}`, the shape factor of `C₂`.
    fn mixture_bound(&self, beta: f64) -> f64 {
        let weibull = 1.0 / (std::f64::consts::E * self.p * (1.0 - beta));
        let log_uniform = (1.0 / self.a).ln() / beta;
        weibull.max(log_uniform)
    }

    /// `C₁ = 1 / (e^{a^p} p ℓ(a))`.
    pub fn c1(&self) -> f64 {
        1.0 / (self.a.powf(self.p).exp() * self.p * self.ell_a)
    }

    /// `C₂ = max{1/(e p (1-β)), log(1/a)/β} / ℓ(a)`.
    pub fn c2(&self, beta: f64) -> f64 {
        self.mixture_bound(beta) / self.ell_a
    }

    /// Envelope constant of the sampler actually used for this `a`.
    pub fn envelope_constant(&self, beta: f64) -> f64 {
        if self.uses_shifted_proposal() {
            self.c1()
        } else {
            self.c2(beta)
        }
    }

    /// Exact per-round acceptance probability, `1/C`.
    pub fn acceptance_probability(&self, beta: f64) -> f64 {
        1.0 / self.envelope_constant(beta)
    }

    /// `φ₁(y) = y⁻¹ 1{y ≥ a^p}` on the `p`-power scale.
    pub fn phi1(&self, y: f64) -> f64 {
        if y >= self.a.powf(self.p) {
            1.0 / y
        } else {
            0.0
        }
    }

    /// `φ₂(x) = g_R(x) / (C₂ h₂(x))`, written without `ℓ(a)`.
    pub fn phi2(&self, x: f64, beta: f64) -> f64 {
        let m = self.mixture_bound(beta);
        let xp = x.powf(self.p);
        if x < self.a {
            0.0
        } else if x < 1.0 {
            1.0 / (m * beta * xp.exp() / (1.0 / self.a).ln())
        } else {
            1.0 / (m * (1.0 - beta) * std::f64::consts::E * self.p * xp)
        }
    }

    /// One proposal round: `Some(r)` when the proposal is accepted.
    pub fn propose<R: Rng + ?Sized>(&self, beta: f64, rng: &mut R) -> Option<f64> {
        let u1 = uniform(rng);
        let u2 = uniform(rng);
        if self.uses_shifted_proposal() {
            let y = self.a.powf(self.p) - u1.ln();
            (u2 <= self.phi1(y)).then(|| y.powf(1.0 / self.p))
        } else {
            let x = h2_from_uniform(u1, self.a, self.p, beta);
            (u2 <= self.phi2(x, beta)).then_some(x)
        }
    }

    /// Draws from `G_R(·; a)`, also returning the number of proposal rounds.
    pub fn sample_counted<R: Rng + ?Sized>(&self, beta: f64, rng: &mut R) -> (f64, u64) {
        let mut rounds = 0;
        loop {
            rounds += 1;
            if let Some(r) = self.propose(beta, rng) {
                return (r, rounds);
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, beta: f64, rng: &mut R) -> f64 {
        self.sample_counted(beta, rng).0
    }

    /// CDF of `G_R(·; a)`, `1 - ℓ(r)/ℓ(a)`.
    pub fn cdf(&self, r: f64) -> Result<f64> {
        if r <= self.a {
            return Ok(0.0);
        }
        Ok(1.0 - ell(r, self.p)? / self.ell_a)
    }
}

fn h1_density(x: f64, a: f64, p: f64) -> f64 {
    if x < a {
        return 0.0;
    }
    p * x.powf(p - 1.0) * (a.powf(p) - x.powf(p)).exp()
}

fn h2_density(x: f64, a: f64, p: f64, beta: f64) -> f64 {
    if x < a {
        0.0
    } else if x < 1.0 {
        beta / (x * (1.0 / a).ln())
    } else {
        (1.0 - beta) * p * x.powf(p - 1.0) * (1.0 - x.powf(p)).exp()
    }
}

fn h2_from_uniform(u: f64, a: f64, p: f64, beta: f64) -> f64 {
    if u <= beta {
        ((1.0 - u / beta) * a.ln()).exp()
    } else {
        (1.0 - (1.0 - u).ln() + (1.0 - beta).ln()).powf(1.0 / p)
    }
}

/// Quantile of `h₁(·; a, p)`: `(a^p - log(1 - q))^{1/p}`.
pub fn quantile_h1(q: f64, a: f64, p: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&q) {
        return Err(domain(format!("quantile level must lie in [0, 1), got {q}")));
    }
    if !(a > 0.0 && p > 0.0) {
        return Err(domain("quantile_h1 needs a > 0 and p > 0"));
    }
    Ok((a.powf(p) - (1.0 - q).ln()).powf(1.0 / p))
}

/// Transforms a uniform `u` into a draw from `h₂(·; a, p, β)`.
pub fn h2_quantile(u: f64, a: f64, p: f64, beta: f64) -> Result<f64> {
    check_h2(a, p, beta)?;
    if !(0.0..1.0).contains(&u) {
        return Err(domain(format!("uniform input must lie in [0, 1), got {u}")));
    }
    Ok(h2_from_uniform(u, a, p, beta))
}

/// Draws from `h₂(·; a, p, β)`.
pub fn sample_h2<R: Rng + ?Sized>(a: f64, p: f64, beta: f64, rng: &mut R) -> Result<f64> {
    check_h2(a, p, beta)?;
    Ok(h2_from_uniform(uniform(rng), a, p, beta))
}

fn check_h2(a: f64, p: f64, beta: f64) -> Result<()> {
    if !(a > 0.0 && a < 1.0) {
        return Err(domain(format!("h2 needs a in (0, 1), got {a}")));
    }
    if !(p.is_finite() && p > 0.0) {
        return Err(domain(format!("p must be positive, got {p}")));
    }
    check_beta(beta)
}

/// `φ₂(x; a, p, β)`, the acceptance probability of the `a < 1` sampler.
pub fn phi2(x: f64, a: f64, p: f64, beta: f64) -> Result<f64> {
    check_h2(a, p, beta)?;
    if !(x >= a) {
        return Err(domain(format!("phi2 needs x >= a, got x = {x}, a = {a}")));
    }
    Ok(RadialLaw::new(a, p)?.phi2(x, beta))
}

/// Draws from `G_R(·; a)` with the sampler appropriate for `a`.
pub fn sample_radial<R: Rng + ?Sized>(a: f64, p: f64, beta: f64, rng: &mut R) -> Result<f64> {
    check_beta(beta)?;
    Ok(RadialLaw::new(a, p)?.sample(beta, rng))
}

/// Empirical acceptance rate of `rounds` independent proposal rounds.
pub fn acceptance_rate<R: Rng + ?Sized>(law: &RadialLaw, beta: f64, rounds: u64, rng: &mut R) -> Result<f64> {
    check_beta(beta)?;
    if rounds == 0 {
        return Err(domain("need at least one proposal round"));
    }
    let accepted = (0..rounds).filter(|_| law.propose(beta, rng).is_some()).count();
    Ok(accepted as f64 / rounds as f64)
}

#[derive(Debug, Clone)]
struct MixingRow {
    v: Vec<f64>,
    cumulative: Vec<f64>,
    radial: Vec<RadialLaw>,
}

impl MixingRow {
    fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        if self.v.len() == 1 {
            return 0;
        }
        let u = rng.random::<f64>();
        self.cumulative.partition_point(|&c| c <= u).min(self.v.len() - 1)
    }
}

/// A jump decomposed into its sampled parts, `W = R V^{-1/p} S`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpDraw {
    pub atom: usize,
    pub v: f64,
    pub r: f64,
    pub rounds: u64,
}

impl JumpDraw {
    pub fn magnitude(&self, p: f64) -> f64 {
        self.r * self.v.powf(-1.0 / p)
    }
}

/// The normalized large-jump law for a given threshold `ε`, with all
/// sampling tables precomputed.
#[derive(Debug, Clone)]
pub struct LargeJumpLaw {
    spec: GmgdSpec,
    epsilon: f64,
    lambda: f64,
    sigma_p: Vec<f64>,
    sigma_p_cumulative: Vec<f64>,
    gv_weights: Vec<Vec<f64>>,
    rows: Vec<MixingRow>,
}

impl LargeJumpLaw {
    pub fn new(spec: &GmgdSpec, epsilon: f64) -> Result<Self> {
        check_epsilon(epsilon)?;
        let sigma = spec.spectral();
        if sigma.is_zero() {
            return Err(domain("large-jump law of the zero spectral measure is undefined"));
        }
        let p = spec.p();
        let mut k = Vec::with_capacity(sigma.len());
        let mut gv_weights = Vec::with_capacity(sigma.len());
        let mut rows = Vec::with_capacity(sigma.len());
        for q in spec.thorin() {
            let mut v = Vec::new();
            let mut raw = Vec::new();
            let mut radial = Vec::new();
            for &(vj, qj) in q.points() {
                let law = RadialLaw::new(epsilon * vj.powf(1.0 / p), p)?;
                let w = qj * law.ell_a();
                if w > NEGLIGIBLE_WEIGHT {
                    v.push(vj);
                    raw.push(w);
                    radial.push(law);
                }
            }
            let k_s: f64 = raw.iter().sum();
            let weights: Vec<f64> = raw.iter().map(|w| w / k_s.max(f64::MIN_POSITIVE)).collect();
            let cumulative = cumulative_probabilities(&weights);
            k.push(k_s);
            gv_weights.push(weights);
            rows.push(MixingRow { v, cumulative, radial });
        }
        let lambda: f64 = sigma.weights().iter().zip(&k).map(|(w, k)| w * k).sum();
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(domain(format!("large-jump intensity is not positive and finite: {lambda}")));
        }
        let sigma_p: Vec<f64> = sigma
            .weights()
            .iter()
            .zip(&k)
            .map(|(w, k)| w * k / lambda)
            .collect();
        let sigma_p_cumulative = cumulative_probabilities(&sigma_p);
        Ok(Self {
            spec: spec.clone(),
            epsilon,
            lambda,
            sigma_p,
            sigma_p_cumulative,
            gv_weights,
            rows,
        })
    }

    pub fn spec(&self) -> &GmgdSpec {
        &self.spec
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// `λ^ε`, the rate of jumps larger than `ε`.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `σ_p` as per-atom probabilities.
    pub fn sigma_p_weights(&self) -> &[f64] {
        &self.sigma_p
    }

    /// `G_V(·; s_i)` as probabilities over the retained Thorin support of atom `i`.
    pub fn gv_weights(&self, atom: usize) -> &[f64] {
        &self.gv_weights[atom]
    }

    /// Thorin support points matching [`Self::gv_weights`].
    pub fn gv_support(&self, atom: usize) -> &[f64] {
        &self.rows[atom].v
    }

    fn sample_atom<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let n = self.sigma_p_cumulative.len();
        if n == 1 {
            return 0;
        }
        let u = rng.random::<f64>();
        self.sigma_p_cumulative.partition_point(|&c| c <= u).min(n - 1)
    }

    /// Samples `(S, V, R)` of one normalized large jump.
    pub fn sample_parts<R: Rng + ?Sized>(&self, beta: f64, rng: &mut R) -> JumpDraw {
        let atom = self.sample_atom(rng);
        let row = &self.rows[atom];
        let j = row.sample_index(rng);
        let (r, rounds) = row.radial[j].sample_counted(beta, rng);
        JumpDraw { atom, v: row.v[j], r, rounds }
    }

    /// Writes `W = R V^{-1/p} S` into `out`; returns the proposal rounds used.
    pub fn sample_jump_into<R: Rng + ?Sized>(&self, beta: f64, rng: &mut R, out: &mut [f64]) -> u64 {
        let draw = self.sample_parts(beta, rng);
        let magnitude = draw.magnitude(self.spec.p());
        for (o, s) in out.iter_mut().zip(self.spec.spectral().atom(draw.atom)) {
            *o = magnitude * s;
        }
        draw.rounds
    }

    /// Samples one jump from the normalized large-jump law.
    pub fn sample_large_jump<R: Rng + ?Sized>(&self, beta: f64, rng: &mut R) -> Result<Vec<f64>> {
        check_beta(beta)?;
        let mut out = vec![0.0; self.spec.dim()];
        self.sample_jump_into(beta, rng, &mut out);
        Ok(out)
    }

    /// Runs the compound Poisson construction on `[0, horizon]`, calling
    /// `emit(time, jump)` for each jump in generation order. Returns the
    /// total number of radial proposal rounds.
    pub(crate) fn for_each_jump<R, F>(&self, horizon: f64, beta: f64, rng: &mut R, mut emit: F) -> u64
    where
        R: Rng + ?Sized,
        F: FnMut(f64, &[f64]),
    {
        let mean = horizon * self.lambda;
        let count = Poisson::new(mean).expect("positive finite Poisson mean").sample(rng) as usize;
        let times: Vec<f64> = (0..count).map(|_| horizon * uniform(rng)).collect();
        let mut jump = vec![0.0; self.spec.dim()];
        let mut rounds = 0;
        for t in times {
            rounds += self.sample_jump_into(beta, rng, &mut jump);
            emit(t, &jump);
        }
        rounds
    }

    /// Samples a path of the compound Poisson process of jumps larger than `ε`.
    pub fn sample_path<R: Rng + ?Sized>(&self, horizon: f64, beta: f64, rng: &mut R) -> Result<PathSkeleton> {
        Ok(self.sample_path_counted(horizon, beta, rng)?.0)
    }

    /// As [`Self::sample_path`], also returning the radial proposal rounds.
    pub fn sample_path_counted<R: Rng + ?Sized>(
        &self,
        horizon: f64,
        beta: f64,
        rng: &mut R,
    ) -> Result<(PathSkeleton, u64)> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(domain(format!("horizon must be finite and positive, got {horizon}")));
        }
        check_beta(beta)?;
        let mut path = PathSkeleton::new(horizon, vec![0.0; self.spec.dim()])?;
        let rounds = self.for_each_jump(horizon, beta, rng, |t, j| path.push_jump_unsorted(t, j));
        path.sort_jumps();
        Ok((path, rounds))
    }
}

fn cumulative_probabilities(weights: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    let mut out: Vec<f64> = weights
        .iter()
        .map(|w| {
            acc += w;
            acc
        })
        .collect();
    if let Some(last) = out.last_mut() {
        *last = 1.0;
    }
    out
}
