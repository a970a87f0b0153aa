//! Property tests over randomly drawn parameters and specs.

mod common;

use common::{log_envelope, log_h1, log_h2, log_target, tail_integral};
use gmgd::large_jumps::phi2;
use gmgd::process::{Component, Simulator};
use gmgd::spectral::AtomSet;
use gmgd::special::ell;
use gmgd::validation::{convergence_check, default_time_grid, moment_study, StudyTarget};
use gmgd::{GmgdSpec, LargeJumpLaw, RadialLaw, SimulationConfig, SpectralMeasure, ThorinMeasure};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Distinct circle directions: one per slot of a partition of the circle,
/// jittered inside its slot.
fn circle_atoms(offsets: &[f64]) -> Vec<Vec<f64>> {
    let n = offsets.len() as f64;
    offsets
        .iter()
        .enumerate()
        .map(|(i, u)| {
            let angle = std::f64::consts::TAU * (i as f64 + 0.1 + 0.8 * u) / n;
            vec![angle.cos(), angle.sin()]
        })
        .collect()
}

fn thorin_rows(n: usize) -> impl Strategy<Value = Vec<Vec<(f64, f64)>>> {
    prop::collection::vec(prop::collection::vec((0.05f64..8.0, 0.05f64..1.0), 1..4), n).prop_map(|rows| {
        rows.into_iter()
            .map(|row| {
                let total: f64 = row.iter().map(|(_, q)| q).sum();
                let mut row: Vec<(f64, f64)> = row.into_iter().map(|(v, q)| (v, q / total)).collect();
                let rest: f64 = row[1..].iter().map(|(_, q)| q).sum();
                row[0].1 = 1.0 - rest;
                row
            })
            .collect()
    })
}

fn arb_spec() -> impl Strategy<Value = GmgdSpec> {
    (1usize..5).prop_flat_map(|n| {
        (
            prop::collection::vec(0.0f64..1.0, n),
            prop::collection::vec(0.1f64..3.0, n),
            thorin_rows(n),
            0.3f64..3.0,
        )
            .prop_map(|(offsets, weights, rows, p)| {
                let spectral = SpectralMeasure::new(2, circle_atoms(&offsets), weights).unwrap();
                let thorin = rows.into_iter().map(|r| ThorinMeasure::new(r).unwrap()).collect();
                GmgdSpec::new(p, vec![0.0, 0.0], spectral, thorin).unwrap()
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ell_matches_quadrature(log_u in -6.0f64..1.0, p in 0.3f64..3.0) {
        let u = 10f64.powf(log_u);
        let exact = tail_integral(u, p);
        let got = ell(u, p).unwrap();
        prop_assert!((got - exact).abs() <= 1e-9 * exact, "u {u} p {p}: {got} vs {exact}");
    }

    #[test]
    fn ell_tail_bound_and_monotone(up in 1.0f64..600.0, p in 0.3f64..3.0, step in 1.0001f64..3.0) {
        let u = up.powf(1.0 / p);
        let value = ell(u, p).unwrap();
        prop_assert!(value > 0.0);
        prop_assert!(value <= (-up).exp() / (p * up) * (1.0 + 1e-12));
        prop_assert!(ell(u * step, p).unwrap() <= value);
    }

    #[test]
    fn spectral_invariants(offsets in prop::collection::vec(0.0f64..1.0, 1..9),
                           scale in prop::collection::vec(0.01f64..5.0, 8)) {
        let atoms = circle_atoms(&offsets);
        let weights = scale[..atoms.len()].to_vec();
        let sigma = SpectralMeasure::new(2, atoms.clone(), weights.clone()).unwrap();
        for s in sigma.atoms() {
            prop_assert!((s[0].hypot(s[1]) - 1.0).abs() <= 1e-12);
        }
        let total: f64 = weights.iter().sum();
        prop_assert!((sigma.total_mass() - total).abs() <= 1e-12 * total);

        let mut long = atoms.clone();
        long[0] = long[0].iter().map(|x| x * (1.0 + 1e-6)).collect();
        prop_assert!(SpectralMeasure::new(2, long, weights.clone()).is_err());
        let mut zero_weight = weights.clone();
        zero_weight[0] = 0.0;
        prop_assert!(SpectralMeasure::new(2, atoms.clone(), zero_weight).is_err());
        let mut doubled = atoms.clone();
        doubled.push(atoms[0].clone());
        let mut more = weights;
        more.push(1.0);
        prop_assert!(SpectralMeasure::new(2, doubled, more).is_err());
    }

    #[test]
    fn large_jump_law_tables(spec in arb_spec(), epsilon in 0.01f64..2.0) {
        let law = LargeJumpLaw::new(&spec, epsilon).unwrap();
        let p = spec.p();
        let mut lambda = 0.0;
        let mut k = Vec::new();
        for (i, w) in spec.spectral().weights().iter().enumerate() {
            let rows: Vec<f64> = spec.thorin()[i]
                .points()
                .iter()
                .map(|&(v, q)| q * tail_integral(epsilon * v.powf(1.0 / p), p))
                .collect();
            let k_i: f64 = rows.iter().sum();
            let gv = law.gv_weights(i);
            prop_assert!((gv.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            for (g, r) in gv.iter().zip(&rows) {
                prop_assert!((g - r / k_i).abs() <= 1e-9, "gv {g} vs {}", r / k_i);
            }
            lambda += w * k_i;
            k.push(w * k_i);
        }
        prop_assert!((law.lambda() - lambda).abs() <= 1e-9 * lambda);
        let sp = law.sigma_p_weights();
        prop_assert!((sp.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        for (s, k_i) in sp.iter().zip(&k) {
            prop_assert!((s - k_i / lambda).abs() <= 1e-9);
        }
    }

    #[test]
    fn envelope_dominates_target(a in 0.005f64..5.0, p in 0.4f64..2.5, beta in 0.1f64..0.9, offset in 0.0f64..1.0) {
        let ell_a = tail_integral(a, p);
        let log_c = log_envelope(a, p, beta, ell_a);
        // sample the support on a log scale so both sides of x = 1 are hit
        let x = a * (1.0 + 40.0 / a).powf(offset);
        let log_h = if a >= 1.0 { log_h1(x, a, p) } else { log_h2(x, a, p, beta) };
        let excess = log_target(x, p, ell_a) - (log_c + log_h);
        prop_assert!(excess <= 1e-10, "a {a} p {p} beta {beta} x {x}: excess {excess}");

        let law = RadialLaw::new(a, p).unwrap();
        let phi = if a >= 1.0 { law.phi1(x.powf(p)) } else { phi2(x, a, p, beta).unwrap() };
        prop_assert!(phi > 0.0 && phi <= 1.0 + 1e-12, "phi {phi}");
        let identity = phi.ln() + log_c + log_h - log_target(x, p, ell_a);
        prop_assert!(identity.abs() <= 1e-9, "acceptance ratio identity off by {identity}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn large_jumps_exceed_threshold_along_atoms(spec in arb_spec(), epsilon in 0.01f64..2.0,
                                                beta in 0.1f64..0.9, seed in any::<u64>()) {
        let law = LargeJumpLaw::new(&spec, epsilon).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..200 {
            let w = law.sample_large_jump(beta, &mut rng).unwrap();
            let norm = w[0].hypot(w[1]);
            prop_assert!(norm > epsilon, "|W| = {norm} <= {epsilon}");
            let s = [w[0] / norm, w[1] / norm];
            prop_assert!(spec.spectral().find_atom(&s).is_some());
        }
    }

    #[test]
    fn jump_dichotomy_and_path_layout(spec in arb_spec(), epsilon in 0.05f64..0.6,
                                      horizon in 0.1f64..2.0, seed in any::<u64>(), rep in 0u64..1000) {
        let config = SimulationConfig { epsilon, horizon, shot_noise_k: 2000, seed, ..Default::default() };
        let sim = Simulator::new(&spec, config).unwrap();
        let small = sim.sample_path(rep, Component::SmallJumps).unwrap();
        let large = sim.sample_path(rep, Component::LargeJumps).unwrap();
        let full = sim.sample_path(rep, Component::Full).unwrap();
        prop_assert!(small.jump_magnitudes().iter().all(|&m| m > 0.0 && m < epsilon));
        prop_assert!(large.jump_magnitudes().iter().all(|&m| m > epsilon));
        prop_assert_eq!(full.num_jumps(), small.num_jumps() + large.num_jumps());
        let times = full.jump_times();
        prop_assert!(times.iter().all(|&t| (0.0..=horizon).contains(&t)));
        prop_assert!(times.windows(2).all(|w| w[0] <= w[1]));
        // replications are independent of the order they are drawn in
        prop_assert_eq!(sim.sample_path(rep, Component::Full).unwrap(), full);
    }

    #[test]
    fn convergence_ratios_approach_one(spec in arb_spec(), p_test in 0.3f64..3.0,
                                       start in 0.05f64..1.0, shrink in 0.05f64..0.7,
                                       mask in prop::collection::vec(any::<bool>(), 4)) {
        let epsilons: Vec<f64> = (0..5).map(|k| start * shrink.powi(k)).collect();
        let chosen: Vec<usize> = (0..spec.spectral().len()).filter(|&i| mask[i]).collect();
        for sector in [AtomSet::All, AtomSet::Indices(chosen)] {
            let points = convergence_check(&spec, &sector, p_test, &epsilons).unwrap();
            for w in points.windows(2) {
                prop_assert!((w[1].ratio - 1.0).abs() <= (w[0].ratio - 1.0).abs(),
                    "{} -> {}", w[0].ratio, w[1].ratio);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn study_errors_are_consistent(atoms in 2usize..12, epsilon in 0.05f64..0.5,
                                   seed in any::<u64>(), full in any::<bool>()) {
        let spec = GmgdSpec::circle_study(atoms).unwrap();
        let config = SimulationConfig { epsilon, seed, shot_noise_k: 1000, ..Default::default() };
        let target = if full { StudyTarget::FullProcess } else { StudyTarget::LargeJumps };
        let report = moment_study(&spec, &config, 300, &default_time_grid(1.0, 4), target).unwrap();
        for row in &report.rows {
            let parts = [row.err_mean[0], row.err_mean[1], row.err_var[0], row.err_var[1], row.err_cov];
            prop_assert!(parts.iter().all(|&e| e >= 0.0));
            let rss = parts.iter().map(|e| e * e).sum::<f64>().sqrt();
            prop_assert!((row.total_error - rss).abs() <= 1e-15 * rss.max(1.0));
        }
    }
}
