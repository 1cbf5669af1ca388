//! Monte Carlo checks of the limit theorems: KS distances, replicated
//! studentized statistics, covariance and semimetric traces, and gated
//! validation runs.

mod ks;
mod monte_carlo;
mod validate;

pub use ks::{exp1_cdf, ks_one_sample, ks_two_sample, standard_normal_cdf, KsReference};
pub use monte_carlo::{
    empirical_cov, mc_studentized, moments, pearson, report_from_replicates, rho_convergence_trace,
    simulate_replicates, ConfigEcho, LimitDrawSummary, McConfig, Moments, MonteCarloReport, RhoPoint,
    WeightSummary,
};
pub use validate::{
    pooled_malmquist, validate, Gate, MalmquistSummary, ValidationMode, ValidationReport, COVARIANCE_GATE,
    LIMIT_LAW_KS_GATE, LIMIT_MEAN_GATE, LIMIT_SKEW_GATE, LIMIT_VARIANCE_GATE, MALMQUIST_KS_GATE,
    MALMQUIST_MEAN_RANGE, NORMALITY_GATE, NORMALITY_GATE_PERTURBED, RHO_GATE,
};
