//! Kolmogorov–Smirnov distances.

use crate::error::{Error, Result};

/// Reference distribution for [`ks_one_sample`].
#[derive(Debug, Clone, Copy)]
pub enum KsReference<'a> {
    StandardNormal,
    Exp1,
    /// A second sample; the distance is the two-sample statistic.
    Empirical(&'a [f64]),
}

pub fn standard_normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

pub fn exp1_cdf(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -(-x).exp_m1()
    }
}

fn sorted(draws: &[f64], what: &str) -> Result<Vec<f64>> {
    if draws.is_empty() {
        return Err(Error::InvalidInput(format!("{what} is empty")));
    }
    if let Some(i) = draws.iter().position(|x| x.is_nan()) {
        return Err(Error::InvalidInput(format!("{what} has NaN at index {i}")));
    }
    let mut v = draws.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

fn ks_against(draws: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    let x = sorted(draws, "sample")?;
    let n = x.len() as f64;
    let d = x
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let c = cdf(v);
            (c - i as f64 / n).max((i + 1) as f64 / n - c)
        })
        .fold(0.0, f64::max);
    Ok(d.clamp(0.0, 1.0))
}

/// `sup_x |F_a(x) - F_b(x)|` over the merged grid of both samples.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<f64> {
    let x = sorted(a, "first sample")?;
    let y = sorted(b, "second sample")?;
    let (n, m) = (x.len() as f64, y.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < x.len() && j < y.len() {
        let t = x[i].min(y[j]);
        while i < x.len() && x[i] <= t {
            i += 1;
        }
        while j < y.len() && y[j] <= t {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    Ok(d)
}

/// Sup-distance between the empirical CDF of `draws` and `reference`.
pub fn ks_one_sample(draws: &[f64], reference: KsReference<'_>) -> Result<f64> {
    match reference {
        KsReference::StandardNormal => ks_against(draws, standard_normal_cdf),
        KsReference::Exp1 => ks_against(draws, exp1_cdf),
        KsReference::Empirical(other) => ks_two_sample(draws, other),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tail::RngStream;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn trivial_cases() {
        let a = [0.3, -1.0, 2.5, 0.3];
        assert_eq!(ks_one_sample(&a, KsReference::Empirical(&a)).unwrap(), 0.0);
        assert_eq!(ks_one_sample(&[0.0; 10], KsReference::StandardNormal).unwrap(), 0.5);
        assert!(ks_one_sample(&[], KsReference::Exp1).is_err());
        assert!(ks_two_sample(&[1.0], &[]).is_err());
        assert!(ks_one_sample(&[f64::NAN], KsReference::Exp1).is_err());
    }

    #[test]
    fn disjoint_samples_are_at_distance_one() {
        assert_eq!(ks_two_sample(&[1.0, 2.0], &[3.0, 4.0, 5.0]).unwrap(), 1.0);
        assert!((ks_two_sample(&[1.0, 3.0], &[2.0, 4.0]).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn single_point_vs_exponential() {
        // F(1) = 1 - 1/e, the ECDF jumps from 0 to 1 there.
        let d = ks_one_sample(&[1.0], KsReference::Exp1).unwrap();
        assert!((d - (1.0 - 1.0f64.exp().recip()).max(1.0f64.exp().recip())).abs() < 1e-15);
    }

    #[test]
    fn normal_draws_within_critical_value() {
        let mut g = RngStream::new(17, 0).generator();
        let x: Vec<f64> = (0..10_000).map(|_| StandardNormal.sample(&mut g)).collect();
        let d = ks_one_sample(&x, KsReference::StandardNormal).unwrap();
        assert!(d < 1.36 / 100.0, "{d}");
    }

    #[test]
    fn cdf_values() {
        assert!((standard_normal_cdf(0.0) - 0.5).abs() < 1e-16);
        assert!((standard_normal_cdf(1.959963984540054) - 0.975).abs() < 1e-12);
        assert!((standard_normal_cdf(-8.0) - 6.22096057427178e-16).abs() < 1e-27);
        assert_eq!(exp1_cdf(-1.0), 0.0);
        assert!((exp1_cdf(2.0f64.ln()) - 0.5).abs() < 1e-16);
    }
}
