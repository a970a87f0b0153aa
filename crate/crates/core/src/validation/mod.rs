//! Checks of the simulators against closed forms and reference laws.

mod convergence;
mod gof;
mod moments;
mod summation;

pub use convergence::{convergence_check, write_convergence_csv, ConvergencePoint};
pub use gof::{
    chi_square_test, kolmogorov_survival, ks_critical_value, ks_one_sample, ks_one_sample_sorted, ks_two_sample, GofOutcome,
    MIN_KS_POINTS,
};
pub use moments::{
    analytic_moments, analytic_moments_study, default_time_grid, moment_studies, moment_study, total_error, AnalyticMoments,
    MomentReport, StudyTarget, TimeRow,
};
pub use summation::KahanSum;
