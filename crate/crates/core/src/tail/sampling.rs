//! Exact samplers: i.i.d. data, the lowest uniform order statistics through
//! exponential spacings, and Malmquist spacings.

use rand_distr::{Distribution, Exp1, Gamma};

use crate::error::{domain, Error, Result};
use crate::estimators::OrderedSample;
use crate::scalar::Real;
use crate::tail::model::TailModel;
use crate::tail::rng::{uniform_open, RngStream};

/// `n` i.i.d. values of `Y = G^{-1}(1 - U)`.
pub fn sample_iid<T: Real>(model: &TailModel<T>, n: usize, rng: RngStream) -> Result<Vec<T>> {
    if n == 0 {
        return domain("sample size must be at least 1");
    }
    let mut gen = rng.generator();
    (0..n)
        .map(|_| model.quantile(T::lit(uniform_open(&mut gen))))
        .collect()
}

/// `ln U_{1,n} < ... < ln U_{k+1,n}` via `U_{j,n} = Γ_j / Γ_{n+1}`.
///
/// `Γ_{n+1} - Γ_{k+1}` is drawn as one Gamma(n - k) variate, so the cost is
/// O(k) whatever `n` is.
pub fn sample_top_log_uniform_order_stats(n: usize, k: usize, rng: RngStream) -> Result<Vec<f64>> {
    if k == 0 {
        return domain("k must be at least 1");
    }
    if k + 1 > n {
        return domain(format!("need k + 1 <= n, got k={k}, n={n}"));
    }
    let mut gen = rng.generator();
    let mut partial = Vec::with_capacity(k + 1);
    let mut acc = 0.0_f64;
    for _ in 0..=k {
        let e: f64 = Exp1.sample(&mut gen);
        acc += e;
        partial.push(acc);
    }
    let rest = Gamma::new((n - k) as f64, 1.0)
        .map_err(|e| Error::Numeric(format!("gamma sampler: {e}")))?
        .sample(&mut gen);
    let ln_total = (acc + rest).ln();
    Ok(partial.into_iter().map(|g| g.ln() - ln_total).collect())
}

/// The `k + 1` smallest of `n` uniform order statistics, ascending.
pub fn sample_top_uniform_order_stats<T: Real>(n: usize, k: usize, rng: RngStream) -> Result<Vec<T>> {
    Ok(sample_top_log_uniform_order_stats(n, k, rng)?
        .into_iter()
        .map(|l| T::lit(l.exp()))
        .collect())
}

/// The top `k + 1` log order statistics of an `n`-sample from `model`,
/// obtained as `Y_{n-j+1,n} = G^{-1}(1 - U_{j,n})`.
pub fn sample_top_order_stats<T: Real>(
    model: &TailModel<T>,
    n: usize,
    k: usize,
    rng: RngStream,
) -> Result<OrderedSample<T>> {
    let y_top = sample_top_log_uniform_order_stats(n, k, rng)?
        .into_iter()
        .map(|l| model.quantile_ln(T::lit(l)))
        .collect::<Result<Vec<T>>>()?;
    OrderedSample::from_descending(n, y_top)
}

/// `s_j = j log(U_{j+1,n} / U_{j,n})` for `j = 1..=k`.
pub fn malmquist_spacings<T: Real>(uniform_order_stats: &[T], k: usize) -> Result<Vec<T>> {
    let u = uniform_order_stats;
    if k == 0 {
        return domain("k must be at least 1");
    }
    if u.len() < k + 1 {
        return Err(Error::InvalidInput(format!(
            "need {} order statistics, got {}",
            k + 1,
            u.len()
        )));
    }
    if let Some(bad) = u[..=k].iter().find(|&&x| !(x > T::zero() && x < T::one())) {
        return Err(Error::InvalidInput(format!("order statistic {bad} outside (0, 1)")));
    }
    if let Some(i) = (0..k).find(|&i| !(u[i] < u[i + 1])) {
        return Err(Error::InvalidInput(format!(
            "order statistics not strictly ascending at positions {} and {}",
            i + 1,
            i + 2
        )));
    }
    Ok((1..=k)
        .map(|j| T::from_index(j) * (u[j] / u[j - 1]).ln())
        .collect())
}
