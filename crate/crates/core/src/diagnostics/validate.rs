//! Gated validation runs, one per convergence statement.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::diagnostics::ks::{ks_one_sample, KsReference};
use crate::diagnostics::monte_carlo::{
    moments, report_from_replicates, rho_convergence_trace, simulate_replicates, McConfig, MonteCarloReport,
    Moments, RhoPoint,
};
use crate::error::{Error, Result};
use crate::estimators::ScaleMode;
use crate::evt::gamma_power;
use crate::tail::{malmquist_spacings, sample_top_uniform_order_stats};

pub const NORMALITY_GATE: f64 = 0.05;
pub const NORMALITY_GATE_PERTURBED: f64 = 0.07;
pub const LIMIT_LAW_KS_GATE: f64 = 0.06;
pub const LIMIT_MEAN_GATE: f64 = 0.07;
pub const LIMIT_VARIANCE_GATE: f64 = 0.05;
pub const LIMIT_SKEW_GATE: f64 = 0.1;
pub const COVARIANCE_GATE: f64 = 0.03;
pub const MALMQUIST_KS_GATE: f64 = 0.02;
pub const MALMQUIST_MEAN_RANGE: (f64, f64) = (0.97, 1.03);
pub const RHO_GATE: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ValidationMode {
    Normality,
    LimitLaw,
    Covariance,
    Malmquist,
    Rho,
}

impl fmt::Display for ValidationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Normality => "normality",
            Self::LimitLaw => "limit-law",
            Self::Covariance => "covariance",
            Self::Malmquist => "malmquist",
            Self::Rho => "rho",
        })
    }
}

impl FromStr for ValidationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "normality" => Ok(Self::Normality),
            "limit-law" => Ok(Self::LimitLaw),
            "covariance" => Ok(Self::Covariance),
            "malmquist" => Ok(Self::Malmquist),
            "rho" => Ok(Self::Rho),
            other => Err(Error::Config(format!(
                "unknown mode `{other}` (normality|limit-law|covariance|malmquist|rho)"
            ))),
        }
    }
}

/// One pass/fail check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Gate {
    pub name: String,
    pub value: f64,
    pub rule: String,
    pub passed: bool,
    /// Non-binding gates are reported but do not decide the verdict.
    pub binding: bool,
}

impl Gate {
    fn below(name: impl Into<String>, value: f64, bound: f64, binding: bool) -> Self {
        Self {
            name: name.into(),
            value,
            rule: format!("< {bound}"),
            passed: value < bound,
            binding,
        }
    }

    fn at_most(name: impl Into<String>, value: f64, bound: f64, binding: bool) -> Self {
        Self {
            name: name.into(),
            value,
            rule: format!("<= {bound}"),
            passed: value <= bound,
            binding,
        }
    }

    fn within(name: impl Into<String>, value: f64, lo: f64, hi: f64) -> Self {
        Self {
            name: name.into(),
            value,
            rule: format!("in [{lo}, {hi}]"),
            passed: (lo..=hi).contains(&value),
            binding: true,
        }
    }
}

/// Pooled Malmquist spacings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MalmquistSummary {
    pub count: usize,
    pub mean: f64,
    pub variance: f64,
    pub ks_vs_exp1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub mode: ValidationMode,
    pub passed: bool,
    pub gates: Vec<Gate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub malmquist: Option<MalmquistSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho_trace: Option<Vec<RhoPoint>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub monte_carlo: Option<MonteCarloReport>,
}

impl ValidationReport {
    fn new(mode: ValidationMode, gates: Vec<Gate>) -> Self {
        let passed = gates.iter().filter(|g| g.binding).all(|g| g.passed);
        Self {
            mode,
            passed,
            gates,
            malmquist: None,
            rho_trace: None,
            monte_carlo: None,
        }
    }

    pub fn failed_gates(&self) -> impl Iterator<Item = &Gate> {
        self.gates.iter().filter(|g| g.binding && !g.passed)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Numeric(format!("report serialization: {e}")))
    }
}

/// Runs `mode` on `config`. `k_grid` is used by the `rho` mode and, for
/// `covariance`, attached as a trace of the first pair.
pub fn validate(mode: ValidationMode, config: &McConfig, k_grid: &[usize]) -> Result<ValidationReport> {
    match mode {
        ValidationMode::Normality => normality(config),
        ValidationMode::LimitLaw => limit_law(config),
        ValidationMode::Covariance => covariance(config, k_grid),
        ValidationMode::Malmquist => malmquist(config),
        ValidationMode::Rho => rho(config, k_grid),
    }
}

fn binding(config: &McConfig) -> bool {
    config.scale_mode == ScaleMode::Oracle
}

fn normality(config: &McConfig) -> Result<ValidationReport> {
    let report = report_from_replicates(config, &simulate_replicates(config)?)?;
    let bound = if config.model.is_perturbed() {
        NORMALITY_GATE_PERTURBED
    } else {
        NORMALITY_GATE
    };
    let gates = report
        .summaries
        .iter()
        .map(|s| Gate::below(format!("ks_vs_normal[{}]", s.weight), s.ks_vs_normal, bound, binding(config)))
        .collect();
    let mut out = ValidationReport::new(ValidationMode::Normality, gates);
    out.monte_carlo = Some(report);
    Ok(out)
}

fn limit_law(config: &McConfig) -> Result<ValidationReport> {
    let report = report_from_replicates(config, &simulate_replicates(config)?)?;
    if report.limit_draws.is_empty() {
        return Err(Error::Config(
            "limit-law mode needs a weight with square-summable f(j)/j, e.g. pow:0.25".into(),
        ));
    }
    let b = binding(config);
    let mut gates = Vec::new();
    for s in report.summaries.iter() {
        if let Some(ks) = s.ks_vs_limit_law {
            gates.push(Gate::below(format!("ks_vs_limit_law[{}]", s.weight), ks, LIMIT_LAW_KS_GATE, b));
        }
    }
    for d in &report.limit_draws {
        let w = &d.weight;
        gates.push(Gate::below(format!("limit_mean[{w}]"), d.mean.abs(), LIMIT_MEAN_GATE, true));
        gates.push(Gate::below(format!("limit_variance[{w}]"), (d.variance - 1.0).abs(), LIMIT_VARIANCE_GATE, true));
        gates.push(Gate::below(format!("limit_skewness[{w}]"), (d.skewness - d.kappa3).abs(), LIMIT_SKEW_GATE, true));
    }
    let mut out = ValidationReport::new(ValidationMode::LimitLaw, gates);
    out.monte_carlo = Some(report);
    Ok(out)
}

fn covariance(config: &McConfig, k_grid: &[usize]) -> Result<ValidationReport> {
    if config.weights.len() < 2 {
        return Err(Error::Config("covariance mode needs at least two weights".into()));
    }
    let mut report = report_from_replicates(config, &simulate_replicates(config)?)?;
    let corr = report.empirical_corr.clone().expect("two or more weights");
    let b = binding(config);
    let mut gates = Vec::new();
    let w = &config.weights;
    for a in 0..w.len() {
        for c in (a + 1)..w.len() {
            let name = format!("corr[{}, {}]", w[a], w[c]);
            if w[a] == w[c] {
                gates.push(Gate::at_most(name, (corr[a][c] - 1.0).abs(), 0.0, b));
                continue;
            }
            let (ta, tc) = match (w[a].power_exponent(), w[c].power_exponent()) {
                (Some(x), Some(y)) => (x, y),
                _ => {
                    return Err(Error::Config(format!(
                        "covariance gate needs power weights with a closed-form limit, got {} and {}",
                        w[a], w[c]
                    )))
                }
            };
            let target = gamma_power(ta, tc)?;
            gates.push(Gate::at_most(name, (corr[a][c] - target).abs(), COVARIANCE_GATE, b));
        }
    }
    let grid = if k_grid.is_empty() { vec![config.k] } else { k_grid.to_vec() };
    report.rho_trace = Some(rho_convergence_trace(&w[0], &w[1], &grid)?);
    let mut out = ValidationReport::new(ValidationMode::Covariance, gates);
    out.monte_carlo = Some(report);
    Ok(out)
}

/// Pooled `j log(U_{j+1,n}/U_{j,n})` over `reps` replicates of size `(n, k)`.
pub fn pooled_malmquist(config: &McConfig) -> Result<Vec<f64>> {
    config.check()?;
    let mut pooled = Vec::with_capacity(config.reps * config.k);
    for r in 0..config.reps {
        let u: Vec<f64> = sample_top_uniform_order_stats(config.n, config.k, config.replicate_stream(r))?;
        pooled.extend(malmquist_spacings(&u, config.k)?);
    }
    Ok(pooled)
}

fn malmquist(config: &McConfig) -> Result<ValidationReport> {
    let pooled = pooled_malmquist(config)?;
    let Moments { mean, variance, .. } = moments(&pooled)?;
    let ks = ks_one_sample(&pooled, KsReference::Exp1)?;
    let gates = vec![
        Gate::below("ks_vs_exp1", ks, MALMQUIST_KS_GATE, true),
        Gate::within("pooled_mean", mean, MALMQUIST_MEAN_RANGE.0, MALMQUIST_MEAN_RANGE.1),
    ];
    let mut out = ValidationReport::new(ValidationMode::Malmquist, gates);
    out.malmquist = Some(MalmquistSummary {
        count: pooled.len(),
        mean,
        variance,
        ks_vs_exp1: ks,
    });
    Ok(out)
}

fn rho(config: &McConfig, k_grid: &[usize]) -> Result<ValidationReport> {
    if config.weights.len() < 2 {
        return Err(Error::Config("rho mode needs two weights".into()));
    }
    let grid = if k_grid.is_empty() { vec![config.k] } else { k_grid.to_vec() };
    let trace = rho_convergence_trace(&config.weights[0], &config.weights[1], &grid)?;
    let limit = trace[0].limit.ok_or_else(|| {
        Error::Config("rho mode needs power weights with a closed-form limit".into())
    })?;
    let errs: Vec<f64> = trace.iter().map(|p| (p.rho_sq - limit).abs()).collect();
    let last = *errs.last().expect("nonempty grid");
    let mut gates = vec![Gate::below(
        format!("rho_error[k={}]", trace.last().expect("nonempty").k),
        last,
        RHO_GATE,
        true,
    )];
    if errs.len() > 1 {
        let worst = errs
            .windows(2)
            .map(|w| if w[0] == 0.0 { if w[1] == 0.0 { 0.0 } else { f64::INFINITY } } else { w[1] / w[0] })
            .fold(0.0, f64::max);
        let all_zero = errs.iter().all(|&e| e == 0.0);
        gates.push(Gate::below(
            "rho_error_ratio_max",
            if all_zero { 0.0 } else { worst },
            1.0,
            true,
        ));
    }
    let mut out = ValidationReport::new(ValidationMode::Rho, gates);
    out.rho_trace = Some(trace);
    Ok(out)
}
