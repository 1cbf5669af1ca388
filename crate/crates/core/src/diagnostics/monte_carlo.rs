//! Replicated studentized statistics and the report built from them.

use rayon::prelude::*;
use serde::Serialize;

use crate::diagnostics::ks::{ks_one_sample, ks_two_sample, KsReference};
use crate::error::{domain, Error, Result};
use crate::estimators::{plugin_scale, Domain, ScaleMode, WeightFamily};
use crate::evt::{a_m, gamma_power, rho_n_sq, SeriesValue, WeightFunction, DEFAULT_SERIES_TOL};
use crate::limit::{cumulant_l, sample_limit_l, LimitLawSpec, DEFAULT_LIMIT_TOL};
use crate::tail::{sample_top_order_stats, RngStream, TailModel};

/// Inputs of a Monte Carlo run.
#[derive(Debug, Clone)]
pub struct McConfig {
    pub model: TailModel<f64>,
    pub weights: Vec<WeightFunction<f64>>,
    pub n: usize,
    pub k: usize,
    pub reps: usize,
    pub seed: u64,
    pub scale_mode: ScaleMode,
    /// Tolerance of the series-law sampler used for the `𝓛(f)` comparison.
    pub limit_tol: f64,
}

impl McConfig {
    pub fn new(model: TailModel<f64>, weights: Vec<WeightFunction<f64>>, n: usize, k: usize, reps: usize, seed: u64) -> Self {
        Self {
            model,
            weights,
            n,
            k,
            reps,
            seed,
            scale_mode: ScaleMode::Oracle,
            limit_tol: DEFAULT_LIMIT_TOL,
        }
    }

    pub fn with_scale_mode(mut self, mode: ScaleMode) -> Self {
        self.scale_mode = mode;
        self
    }

    pub fn check(&self) -> Result<()> {
        if self.weights.is_empty() {
            return Err(Error::Config("at least one weight is required".into()));
        }
        if self.reps < 2 {
            return Err(Error::Config(format!("need at least 2 replicates, got {}", self.reps)));
        }
        if self.k == 0 || self.k >= self.n {
            return Err(Error::Config(format!("need 1 <= k < n, got k={}, n={}", self.k, self.n)));
        }
        Ok(())
    }

    /// Stream for replicate `r`.
    pub fn replicate_stream(&self, r: usize) -> RngStream {
        RngStream::new(self.seed, 0).child(r as u64)
    }

    /// Stream for the `𝓛` draws paired with weight `s`.
    pub fn limit_stream(&self, s: usize) -> RngStream {
        RngStream::new(self.seed, 1 + s as u64)
    }

    fn domain(&self) -> Result<Domain> {
        self.model.domain().ok_or_else(|| {
            Error::Config(format!(
                "model `{}` has no studentization domain; use a frechet or gumbel model",
                self.model
            ))
        })
    }
}

/// Replicated statistics `reps × weights`, reduced so that the limit is
/// `N(0,1)` or `𝓛(f)` in both domains: `(T - a_n s) / (σ_n s)`.
pub fn simulate_replicates(config: &McConfig) -> Result<Vec<Vec<f64>>> {
    config.check()?;
    let domain = config.domain()?;
    let family = WeightFamily::new(config.weights.clone(), config.k)?;
    let oracle = match config.scale_mode {
        ScaleMode::Oracle => Some(config.model.oracle_scale(config.n, config.k)?),
        ScaleMode::Plugin => None,
    };
    (0..config.reps)
        .into_par_iter()
        .map(|r| {
            let os = sample_top_order_stats(&config.model, config.n, config.k, config.replicate_stream(r))?;
            let scale = match oracle {
                Some(s) => s,
                None => plugin_scale(&os, domain)?,
            };
            let v = family.studentized(&os, domain, scale)?;
            Ok(match domain {
                Domain::Frechet => v.into_iter().map(|x| x / scale).collect(),
                Domain::Gumbel => v,
            })
        })
        .collect()
}

/// Mean, unbiased variance and moment skewness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
}

pub fn moments(x: &[f64]) -> Result<Moments> {
    if x.len() < 2 {
        return Err(Error::InvalidInput(format!("need at least 2 values, got {}", x.len())));
    }
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let m2 = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let m3 = x.iter().map(|v| (v - mean).powi(3)).sum::<f64>() / n;
    let skewness = if m2 > 0.0 { m3 / m2.powf(1.5) } else { 0.0 };
    Ok(Moments {
        mean,
        variance: m2 * n / (n - 1.0),
        skewness,
    })
}

/// Pearson correlation; a degenerate error when either column is constant.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::InvalidInput("correlation needs two equal-length columns of 2+ values".into()));
    }
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if !(sxx > 0.0 && syy > 0.0) {
        return Err(Error::Degenerate("zero variance in a correlated coordinate".into()));
    }
    if x == y {
        return Ok(1.0);
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

fn column(stats: &[Vec<f64>], s: usize) -> Vec<f64> {
    stats.iter().map(|row| row[s]).collect()
}

/// Echo of the run configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigEcho {
    pub model: String,
    pub f_list: Vec<String>,
    pub n: usize,
    pub k: usize,
    #[serde(rename = "R")]
    pub reps: usize,
    pub seed: u64,
    pub scale_mode: ScaleMode,
    pub domain: String,
}

/// Moments and KS distances of one weight's statistic.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightSummary {
    pub weight: String,
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    pub ks_vs_normal: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ks_vs_limit_law: Option<f64>,
}

/// Moments of the `𝓛(f)` draws a statistic was compared with.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitDrawSummary {
    pub weight: String,
    pub truncation_j: usize,
    pub tail_var_bound: f64,
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    pub kappa3: f64,
}

/// One row of a semimetric trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RhoPoint {
    pub k: usize,
    pub rho_sq: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub limit: Option<f64>,
}

/// Output of [`mc_studentized`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonteCarloReport {
    pub config: ConfigEcho,
    /// Largest per-weight KS distance to `N(0,1)`.
    pub ks_vs_normal: f64,
    /// Largest per-weight two-sample distance to `𝓛(f)`, over weights with `A(2,f) < ∞`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ks_vs_limit_law: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub empirical_corr: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho_trace: Option<Vec<RhoPoint>>,
    pub summaries: Vec<WeightSummary>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub limit_draws: Vec<LimitDrawSummary>,
}

impl MonteCarloReport {
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Numeric(format!("report serialization: {e}")))
    }
}

fn a2_is_finite(f: &WeightFunction<f64>) -> Result<bool> {
    match a_m(f, 2, DEFAULT_SERIES_TOL) {
        Ok(SeriesValue::Finite(_)) => Ok(true),
        Ok(SeriesValue::Divergent) => Ok(false),
        Err(Error::Unsupported(_)) => Ok(false),
        Err(e) => Err(e),
    }
}

/// Runs `reps` replicates and summarizes them.
pub fn mc_studentized(config: &McConfig) -> Result<MonteCarloReport> {
    let stats = simulate_replicates(config)?;
    report_from_replicates(config, &stats)
}

/// Builds the report from replicates produced by [`simulate_replicates`].
pub fn report_from_replicates(config: &McConfig, stats: &[Vec<f64>]) -> Result<MonteCarloReport> {
    let domain = config.domain()?;
    let mut summaries = Vec::with_capacity(config.weights.len());
    let mut limit_draws = Vec::new();
    for (s, f) in config.weights.iter().enumerate() {
        let x = column(stats, s);
        let m = moments(&x)?;
        let ks_normal = ks_one_sample(&x, KsReference::StandardNormal)?;
        let ks_limit = if a2_is_finite(f)? {
            let spec = LimitLawSpec::new(f.clone(), config.limit_tol)?;
            let draws = sample_limit_l(&spec, config.limit_stream(s), config.reps)?;
            let dm = moments(&draws)?;
            limit_draws.push(LimitDrawSummary {
                weight: f.to_string(),
                truncation_j: spec.truncation_j(),
                tail_var_bound: spec.tail_var_bound(),
                mean: dm.mean,
                variance: dm.variance,
                skewness: dm.skewness,
                kappa3: cumulant_l(f, 3, 1e-9)?,
            });
            Some(ks_two_sample(&x, &draws)?)
        } else {
            None
        };
        summaries.push(WeightSummary {
            weight: f.to_string(),
            mean: m.mean,
            variance: m.variance,
            skewness: m.skewness,
            ks_vs_normal: ks_normal,
            ks_vs_limit_law: ks_limit,
        });
    }
    let ks_vs_normal = summaries.iter().map(|s| s.ks_vs_normal).fold(0.0, f64::max);
    let ks_vs_limit_law = summaries
        .iter()
        .filter_map(|s| s.ks_vs_limit_law)
        .reduce(f64::max);
    let empirical_corr = if config.weights.len() > 1 {
        Some(correlation_matrix(stats, config.weights.len())?)
    } else {
        None
    };
    Ok(MonteCarloReport {
        config: ConfigEcho {
            model: config.model.to_string(),
            f_list: config.weights.iter().map(|f| f.to_string()).collect(),
            n: config.n,
            k: config.k,
            reps: config.reps,
            seed: config.seed,
            scale_mode: config.scale_mode,
            domain: domain.to_string(),
        },
        ks_vs_normal,
        ks_vs_limit_law,
        empirical_corr,
        rho_trace: None,
        summaries,
        limit_draws,
    })
}

fn correlation_matrix(stats: &[Vec<f64>], dim: usize) -> Result<Vec<Vec<f64>>> {
    let cols: Vec<Vec<f64>> = (0..dim).map(|s| column(stats, s)).collect();
    let mut m = vec![vec![1.0; dim]; dim];
    for a in 0..dim {
        for b in 0..a {
            let r = pearson(&cols[a], &cols[b])?;
            m[a][b] = r;
            m[b][a] = r;
        }
    }
    Ok(m)
}

/// Correlation of the paired statistics of weights `pair.0` and `pair.1`.
pub fn empirical_cov(config: &McConfig, pair: (usize, usize)) -> Result<f64> {
    if config.reps < 30 {
        return Err(Error::Config(format!("need at least 30 replicates, got {}", config.reps)));
    }
    let dim = config.weights.len();
    if pair.0 >= dim || pair.1 >= dim {
        return Err(Error::InvalidInput(format!("weight index out of range for {dim} weights")));
    }
    if config.weights[pair.0] == config.weights[pair.1] {
        config.check()?;
        return Ok(1.0);
    }
    let stats = simulate_replicates(config)?;
    pearson(&column(&stats, pair.0), &column(&stats, pair.1))
}

/// `ρ_k²(f1, f2)` along `k_grid`, with `2(1 - Γ(f1, f2))` for power weights.
pub fn rho_convergence_trace(
    f1: &WeightFunction<f64>,
    f2: &WeightFunction<f64>,
    k_grid: &[usize],
) -> Result<Vec<RhoPoint>> {
    if k_grid.is_empty() {
        return domain("k grid is empty");
    }
    if k_grid.windows(2).any(|w| w[0] >= w[1]) {
        return domain("k grid must be strictly ascending");
    }
    let limit = if f1 == f2 {
        Some(0.0)
    } else {
        match (f1.power_exponent(), f2.power_exponent()) {
            (Some(a), Some(b)) => Some(2.0 - 2.0 * gamma_power(a, b)?),
            _ => None,
        }
    };
    k_grid
        .iter()
        .map(|&k| {
            Ok(RhoPoint {
                k,
                rho_sq: rho_n_sq(f1, f2, k)?,
                limit,
            })
        })
        .collect()
}
