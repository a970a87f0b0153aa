mod common;

use common::integrate;
use gmgd::spectral::AtomSet;
use gmgd::validation::{
    analytic_moments, analytic_moments_study, convergence_check, default_time_grid, ks_one_sample, ks_two_sample,
    moment_studies, moment_study, total_error, write_convergence_csv, MomentReport, StudyTarget,
};
use gmgd::{Error, GmgdSpec, SimulationConfig, SpectralMeasure, ThorinMeasure};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn study_spec() -> GmgdSpec {
    GmgdSpec::circle_study(30).unwrap()
}

fn cfg(seed: u64) -> SimulationConfig {
    SimulationConfig { epsilon: 0.1, seed, ..Default::default() }
}

fn irregular_spec() -> GmgdSpec {
    let angles = [0.3, 1.9, 4.0];
    let spectral = SpectralMeasure::new(
        2,
        angles.iter().map(|a: &f64| vec![a.cos(), a.sin()]).collect(),
        vec![0.5, 1.5, 0.25],
    )
    .unwrap();
    let thorin = vec![
        ThorinMeasure::dirac(1.0).unwrap(),
        ThorinMeasure::new(vec![(0.5, 0.3), (3.0, 0.7)]).unwrap(),
        ThorinMeasure::dirac(2.0).unwrap(),
    ];
    GmgdSpec::new(1.0, vec![0.2, -0.1], spectral, thorin).unwrap()
}

/// `∫_ε^∞ r^k e^{-rv} dr` by quadrature.
fn radial_moment(k: i32, eps: f64, v: f64) -> f64 {
    integrate(|r: f64| r.powi(k) * (-r * v).exp(), eps, eps + 60.0 / v)
}

#[test]
fn analytic_moments_match_levy_measure_integrals() {
    let spec = irregular_spec();
    for (eps, t) in [(0.0, 1.0), (0.1, 0.5), (0.7, 2.0)] {
        let mut mean = [0.0; 2];
        let mut second = [[0.0; 2]; 2];
        for (i, s) in spec.spectral().atoms().iter().enumerate() {
            let w = spec.spectral().weights()[i];
            for &(v, q) in spec.thorin()[i].points() {
                let (m1, m2) = (radial_moment(0, eps, v), radial_moment(1, eps, v));
                for k in 0..2 {
                    mean[k] += w * q * s[k] * m1;
                    for l in 0..2 {
                        second[k][l] += w * q * s[k] * s[l] * m2;
                    }
                }
            }
        }
        let with_drift = eps == 0.0;
        let got = analytic_moments(&spec, eps, t, with_drift).unwrap();
        for k in 0..2 {
            let drift = if with_drift { spec.gamma()[k] } else { 0.0 };
            assert!((got.mean[k] - t * (mean[k] + drift)).abs() < 1e-10);
            assert!((got.var[k] - t * second[k][k]).abs() < 1e-10);
        }
        assert!((got.cov - t * second[0][1]).abs() < 1e-10);
    }
}

#[test]
fn study_closed_forms() {
    let m = analytic_moments_study(30, 0.1, 1.0).unwrap();
    assert!(m.mean[0].abs() < 1e-14 && m.mean[1].abs() < 1e-14 && m.cov.abs() < 1e-14);
    let want = 1.1 * (-0.1f64).exp() / 2.0;
    assert!((m.var[0] - want).abs() < 1e-14 && (m.var[1] - want).abs() < 1e-14);
    assert!((want - 0.49766058).abs() < 1e-8);
    let full = analytic_moments_study(30, 0.0, 0.6).unwrap();
    assert!((full.var[0] - 0.3).abs() < 1e-14 && (full.var[1] - 0.3).abs() < 1e-14);
    let single = analytic_moments_study(1, 0.0, 1.0).unwrap();
    assert_eq!((single.mean, single.var, single.cov), ([1.0, 0.0], [1.0, 0.0], 0.0));
    let general = analytic_moments(&study_spec(), 0.1, 1.0, false).unwrap();
    assert!((general.var[0] - want).abs() < 1e-14);
}

#[test]
fn large_jump_study_total_error_is_small() {
    let report = moment_study(&study_spec(), &cfg(3), 500_000, &[1.0], StudyTarget::LargeJumps).unwrap();
    let row = report.at(1.0).unwrap();
    assert!(row.total_error < 0.01, "{row:?}");
    let again = total_error(row.err_mean, row.err_var, row.err_cov);
    assert!((again - row.total_error).abs() <= 1e-15);
}

#[test]
fn studies_are_bit_exact_and_thread_count_independent() {
    let times = default_time_grid(1.0, 20);
    let targets = [StudyTarget::FullProcess, StudyTarget::DropSmallJumps, StudyTarget::LargeJumps];
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| moment_studies(&study_spec(), &cfg(11), 10_000, &times, &targets).unwrap())
    };
    let one = run(1);
    assert_eq!(one, run(1));
    assert_eq!(one, run(3));
    assert_ne!(one, moment_studies(&study_spec(), &cfg(12), 10_000, &times, &targets).unwrap());
    for report in &one {
        assert_eq!(report.rows.len(), 20);
        for row in &report.rows {
            assert!((total_error(row.err_mean, row.err_var, row.err_cov) - row.total_error).abs() <= 1e-15);
        }
    }
    // a study run alone sees the same paths as in a shared run
    let alone = moment_study(&study_spec(), &cfg(11), 10_000, &times, StudyTarget::LargeJumps).unwrap();
    assert_eq!(alone, one[2]);
}

#[test]
fn median_error_falls_with_more_replications() {
    let median = |n: usize| {
        let mut errs: Vec<f64> = (0..20)
            .map(|k| {
                moment_study(&study_spec(), &cfg(1000 + k), n, &[1.0], StudyTarget::LargeJumps)
                    .unwrap()
                    .rows[0]
                    .total_error
            })
            .collect();
        errs.sort_by(f64::total_cmp);
        0.5 * (errs[9] + errs[10])
    };
    let (small, large) = (median(10_000), median(40_000));
    assert!(large < small, "{large} vs {small}");
}

#[test]
fn study_rejects_bad_inputs() {
    let spec = study_spec();
    assert!(matches!(
        moment_study(&spec, &cfg(0), 1, &[1.0], StudyTarget::LargeJumps),
        Err(Error::InsufficientData(_))
    ));
    assert!(moment_study(&spec, &cfg(0), 10, &[0.0, 1.0], StudyTarget::LargeJumps).is_err());
    assert!(moment_study(&spec, &cfg(0), 10, &[0.5, 0.5], StudyTarget::LargeJumps).is_err());
    assert!(moment_study(&spec, &cfg(0), 10, &[1.5], StudyTarget::LargeJumps).is_err());
    let p2 = GmgdSpec::new(2.0, vec![0.0, 0.0], spec.spectral().clone(), spec.thorin().to_vec()).unwrap();
    assert!(moment_study(&p2, &cfg(0), 10, &[1.0], StudyTarget::LargeJumps).is_err());
}

#[test]
fn reports_export_as_csv_and_json() {
    let times = default_time_grid(1.0, 4);
    let report = moment_study(&study_spec(), &cfg(2), 200, &times, StudyTarget::FullProcess).unwrap();
    let mut buf = Vec::new();
    report.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 5);
    assert!(lines[0].starts_with("t,"));
    assert!(lines[1..].iter().all(|l| l.split(',').count() == 17));
    let last: f64 = lines[4].split(',').next_back().unwrap().parse().unwrap();
    assert_eq!(last, report.rows[3].total_error);
    let json = serde_json::to_string(&report).unwrap();
    let back: MomentReport = serde_json::from_str(&json).unwrap();
    assert_eq!(back, report);
}

#[test]
fn convergence_ratios_follow_closed_form() {
    let spec = study_spec();
    let eps = [0.1, 0.01, 0.001, 1e-4];
    let pts = convergence_check(&spec, &AtomSet::All, 1.0, &eps).unwrap();
    for pt in &pts {
        let want = -(-pt.epsilon).exp_m1() / pt.epsilon;
        assert!((pt.ratio - want).abs() < 1e-14);
    }
    assert!((pts[3].ratio - 0.99995).abs() < 1e-6);
    let sector = AtomSet::Indices(vec![0, 7, 12]);
    for p_test in [0.5, 2.0, 3.0] {
        let pts = convergence_check(&spec, &sector, p_test, &eps).unwrap();
        assert!(pts.windows(2).all(|w| (w[1].ratio - 1.0).abs() < (w[0].ratio - 1.0).abs()));
        // (p'/ε^{p'}) ∫_0^ε r^{p'-1} e^{-r} dr, after substituting u = r^{p'}
        for pt in &pts {
            let top = pt.epsilon.powf(p_test);
            let want = integrate(|u: f64| (-u.powf(1.0 / p_test)).exp(), 0.0, top) / top;
            let e = pt.epsilon;
            assert!((pt.ratio - want).abs() < 1e-9, "p' {p_test} eps {e}: {} vs {want}", pt.ratio);
        }
    }
    let none = convergence_check(&spec, &AtomSet::none(), 1.0, &eps).unwrap();
    assert!(none.iter().all(|pt| pt.ratio == 1.0));
    assert!(convergence_check(&spec, &AtomSet::All, 1.0, &[0.01, 0.1]).is_err());
    let mut buf = Vec::new();
    write_convergence_csv(&pts, &mut buf).unwrap();
    assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 5);
}

#[test]
fn ks_calibration() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let uniform: Vec<f64> = (0..100_000).map(|_| rng.random::<f64>()).collect();
    assert!(ks_one_sample(&uniform, |x| x.clamp(0.0, 1.0), 1e-3).unwrap().passed);
    let expo: Vec<f64> = (0..100_000).map(|_| -rng.random::<f64>().ln()).collect();
    assert!(!ks_one_sample(&expo, |x| x.clamp(0.0, 1.0), 1e-3).unwrap().passed);
    assert_eq!(ks_two_sample(&uniform, &uniform, 1e-3).unwrap().statistic, 0.0);
    assert!(matches!(ks_two_sample(&uniform[..50], &uniform, 1e-3), Err(Error::InsufficientData(_))));
}
