//! Order statistics, the generalized Hill statistic `T_n(f)` and its
//! studentized forms.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::evt::{NormalizationSet, WeightFunction};
use crate::scalar::{KahanSum, Real};

/// Extremal domain selecting the studentization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Gumbel,
    Frechet,
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Gumbel => "gumbel",
            Self::Frechet => "frechet",
        })
    }
}

impl FromStr for Domain {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gumbel" => Ok(Self::Gumbel),
            "frechet" => Ok(Self::Frechet),
            other => Err(Error::Config(format!("unknown domain `{other}`"))),
        }
    }
}

/// Where the studentizing scale comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScaleMode {
    /// The model's true `γ` or `s(k/n)`.
    Oracle,
    /// The Hill estimate from the same sample.
    Plugin,
}

impl fmt::Display for ScaleMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Oracle => "oracle",
            Self::Plugin => "plugin",
        })
    }
}

impl FromStr for ScaleMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "oracle" => Ok(Self::Oracle),
            "plugin" => Ok(Self::Plugin),
            other => Err(Error::Config(format!("unknown scale mode `{other}`"))),
        }
    }
}

/// Treatment of tied values among the top order statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TiePolicy {
    /// Ties give zero spacings.
    #[default]
    Keep,
    Reject,
}

/// Logs of the `k + 1` largest observations, largest first.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderedSample<T> {
    n: usize,
    y_top: Vec<T>,
}

impl<T: Real> OrderedSample<T> {
    /// Selects the top `k + 1` values of `data` and takes logs.
    pub fn from_data(data: &[T], k: usize) -> Result<Self> {
        Self::from_data_with(data, k, TiePolicy::Keep)
    }

    pub fn from_data_with(data: &[T], k: usize, ties: TiePolicy) -> Result<Self> {
        if k == 0 {
            return domain("k must be at least 1");
        }
        let mut usable: Vec<T> = data.iter().copied().filter(|x| x.is_finite()).collect();
        let window = k + 1;
        if usable.len() < window {
            return Err(Error::InsufficientData {
                needed: window,
                available: usable.len(),
            });
        }
        let desc = |a: &T, b: &T| b.partial_cmp(a).expect("finite values compare");
        if usable.len() > window {
            usable.select_nth_unstable_by(window - 1, desc);
            usable.truncate(window);
        }
        usable.sort_by(desc);
        let nonpositive = usable.iter().filter(|&&x| x <= T::zero()).count();
        if nonpositive > 0 {
            return Err(Error::Positivity {
                count: nonpositive,
                window,
            });
        }
        if ties == TiePolicy::Reject && usable.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidInput("tied values among the top order statistics".into()));
        }
        let n = data.iter().filter(|x| x.is_finite()).count();
        Ok(Self {
            n,
            y_top: usable.into_iter().map(T::ln).collect(),
        })
    }

    /// Wraps already-sorted log order statistics `Y_{n,n} >= ... >= Y_{n-k,n}`.
    pub fn from_descending(n: usize, y_top: Vec<T>) -> Result<Self> {
        if y_top.len() < 2 {
            return Err(Error::InvalidInput("need at least two order statistics".into()));
        }
        if y_top.len() > n {
            return Err(Error::InvalidInput(format!(
                "{} order statistics from a sample of {n}",
                y_top.len()
            )));
        }
        if y_top.iter().any(|y| !y.is_finite()) {
            return Err(Error::InvalidInput("order statistics must be finite".into()));
        }
        if let Some(i) = (1..y_top.len()).find(|&i| y_top[i] > y_top[i - 1]) {
            return Err(Error::InvalidInput(format!(
                "order statistics increase at position {}",
                i + 1
            )));
        }
        Ok(Self { n, y_top })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.y_top.len() - 1
    }

    pub fn y_top(&self) -> &[T] {
        &self.y_top
    }

    /// Spacings `Y_{n-j+1,n} - Y_{n-j,n}` for `j = 1..=k`.
    pub fn spacings(&self) -> impl Iterator<Item = T> + '_ {
        self.y_top.windows(2).map(|w| w[0] - w[1])
    }

    /// The same sample restricted to its top `k' + 1` values.
    pub fn truncated(&self, k: usize) -> Result<Self> {
        if k == 0 || k > self.k() {
            return domain(format!("cannot restrict {} spacings to {k}", self.k()));
        }
        Ok(Self {
            n: self.n,
            y_top: self.y_top[..=k].to_vec(),
        })
    }
}

/// Selects the inputs of `T_n(f)` from raw data.
pub fn order_statistics<T: Real>(data: &[T], k: usize) -> Result<OrderedSample<T>> {
    OrderedSample::from_data(data, k)
}

/// `T_n(f) = Σ_{j≤k} f(j) (Y_{n-j+1,n} - Y_{n-j,n})`.
pub fn t_n<T: Real>(f: &WeightFunction<T>, os: &OrderedSample<T>) -> Result<T> {
    f.check_support(os.k())?;
    Ok(os
        .spacings()
        .enumerate()
        .map(|(i, s)| f.value(i + 1) * s)
        .collect::<KahanSum<T>>()
        .value())
}

/// Reads one number per line; blank lines and `#` comments are skipped.
pub fn parse_values<T: Real>(text: &str) -> Result<Vec<T>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let v: f64 = line.parse().map_err(|_| Error::Parse {
            line: i + 1,
            message: format!("`{line}` is not a number"),
        })?;
        if !v.is_finite() {
            return Err(Error::Parse {
                line: i + 1,
                message: format!("`{line}` is not finite"),
            });
        }
        out.push(T::lit(v));
    }
    Ok(out)
}

/// Hill estimator `T_n(j ↦ j) / k`.
pub fn hill<T: Real>(os: &OrderedSample<T>) -> T {
    let total = os
        .spacings()
        .enumerate()
        .map(|(i, s)| T::from_index(i + 1) * s)
        .collect::<KahanSum<T>>()
        .value();
    total / T::from_index(os.k())
}

fn check_scale<T: Real>(scale: T) -> Result<()> {
    if !(scale.is_finite() && scale > T::zero()) {
        return domain(format!("studentizing scale must be positive, got {scale}"));
    }
    Ok(())
}

/// Studentized statistic from precomputed normalizations.
///
/// Gumbel: `(T - a_n s) / (σ_n s)`; Fréchet: `(a_n / σ_n)(T / a_n - γ)`.
pub fn studentize_with<T: Real>(
    t: T,
    norms: &NormalizationSet<T>,
    domain: Domain,
    scale: T,
) -> Result<T> {
    check_scale(scale)?;
    Ok(match domain {
        Domain::Gumbel => (t - norms.a_n * scale) / (norms.sigma_n * scale),
        Domain::Frechet => norms.a_n / norms.sigma_n * (t / norms.a_n - scale),
    })
}

pub fn studentize<T: Real>(t: T, f: &WeightFunction<T>, k: usize, domain: Domain, scale: T) -> Result<T> {
    check_scale(scale)?;
    studentize_with(t, &NormalizationSet::compute(f, k)?, domain, scale)
}

/// Hill plug-in for the scale: estimates `γ` (Fréchet) and `s(k/n)` (Gumbel,
/// since `a_n(j ↦ j) = k`).
pub fn plugin_scale<T: Real>(os: &OrderedSample<T>, _domain: Domain) -> Result<T> {
    let h = hill(os);
    if !(h > T::zero()) {
        return Err(Error::Degenerate(
            "Hill estimate is zero (all top values tied); no plug-in scale".into(),
        ));
    }
    Ok(h)
}

/// `z_i = 1 / (x0 - x_i)`, mapping a finite-endpoint sample to a heavy tail
/// with the same `γ`.
pub fn weibull_transform<T: Real>(data: &[T], x0: T) -> Result<Vec<T>> {
    if let Some(max) = data.iter().copied().reduce(T::max) {
        if max > x0 {
            return Err(Error::Endpoint(format!(
                "endpoint {x0} is below the sample maximum {max}"
            )));
        }
    }
    data.iter()
        .enumerate()
        .map(|(i, &x)| {
            if x == x0 {
                Err(Error::Endpoint(format!(
                    "value at index {i} equals the endpoint {x0}"
                )))
            } else {
                Ok(T::one() / (x0 - x))
            }
        })
        .collect()
}

/// `T_n(f)` with its normalizations and studentized values.
#[derive(Debug, Clone, PartialEq)]
pub struct GhpResult<T> {
    pub t_n: T,
    pub norms: NormalizationSet<T>,
    /// `V_n(0, f)`.
    pub v_gumbel: Option<T>,
    /// `V_n(1, f)`.
    pub v_frechet: Option<T>,
    pub scale_used: Option<T>,
    pub scale_mode: Option<ScaleMode>,
}

impl<T: Real> GhpResult<T> {
    /// Statistic and normalizations; studentized values need a scale.
    pub fn compute(f: &WeightFunction<T>, os: &OrderedSample<T>) -> Result<Self> {
        Ok(Self {
            t_n: t_n(f, os)?,
            norms: NormalizationSet::compute(f, os.k())?,
            v_gumbel: None,
            v_frechet: None,
            scale_used: None,
            scale_mode: None,
        })
    }

    /// Fills both studentized values with `scale`.
    pub fn with_scale(mut self, scale: T, mode: ScaleMode) -> Result<Self> {
        self.v_gumbel = Some(studentize_with(self.t_n, &self.norms, Domain::Gumbel, scale)?);
        self.v_frechet = Some(studentize_with(self.t_n, &self.norms, Domain::Frechet, scale)?);
        self.scale_used = Some(scale);
        self.scale_mode = Some(mode);
        Ok(self)
    }
}

/// A list of weights with their values and normalizations at a fixed `k`,
/// evaluated together in one pass over the spacings.
#[derive(Debug, Clone)]
pub struct WeightFamily<T> {
    weights: Vec<WeightFunction<T>>,
    values: Vec<Vec<T>>,
    norms: Vec<NormalizationSet<T>>,
    k: usize,
}

impl<T: Real> WeightFamily<T> {
    pub fn new(weights: Vec<WeightFunction<T>>, k: usize) -> Result<Self> {
        let norms = weights
            .iter()
            .map(|f| NormalizationSet::compute(f, k))
            .collect::<Result<Vec<_>>>()?;
        let values = weights
            .iter()
            .map(|f| (1..=k).map(|j| f.value(j)).collect())
            .collect();
        Ok(Self {
            weights,
            values,
            norms,
            k,
        })
    }

    pub fn weights(&self) -> &[WeightFunction<T>] {
        &self.weights
    }

    pub fn norms(&self) -> &[NormalizationSet<T>] {
        &self.norms
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `T_n(f)` for every weight.
    pub fn statistics(&self, os: &OrderedSample<T>) -> Result<Vec<T>> {
        if os.k() != self.k {
            return Err(Error::InvalidInput(format!(
                "sample has {} spacings, family built for k={}",
                os.k(),
                self.k
            )));
        }
        let mut acc = vec![KahanSum::new(); self.weights.len()];
        for (j, s) in os.spacings().enumerate() {
            for (a, vals) in acc.iter_mut().zip(&self.values) {
                a.add(vals[j] * s);
            }
        }
        Ok(acc.into_iter().map(|a| a.value()).collect())
    }

    /// Studentized statistic for every weight.
    pub fn studentized(&self, os: &OrderedSample<T>, domain: Domain, scale: T) -> Result<Vec<T>> {
        check_scale(scale)?;
        self.statistics(os)?
            .into_iter()
            .zip(&self.norms)
            .map(|(t, n)| studentize_with(t, n, domain, scale))
            .collect()
    }
}

/// Studentized `T_n(f)` over a list of weights.
pub fn process_eval<T: Real>(
    f_list: &[WeightFunction<T>],
    os: &OrderedSample<T>,
    domain: Domain,
    scale: T,
) -> Result<Vec<T>> {
    WeightFamily::new(f_list.to_vec(), os.k())?.studentized(os, domain, scale)
}
