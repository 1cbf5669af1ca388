//! Limit covariance `Γ(f1, f2)` of the studentized process and the semimetrics
//! built from it.

use crate::error::{domain, Error, Result};
use crate::evt::norms::{check_k, ratio_sums};
use crate::evt::weights::WeightFunction;
use crate::scalar::{KahanSum, Real};

/// Closed-form `Γ(j^τ1, j^τ2) = sqrt((2τ1-1)(2τ2-1)) / (τ1+τ2-1)` for τ > 1/2.
pub fn gamma_power<T: Real>(tau1: T, tau2: T) -> Result<T> {
    let half = T::lit(0.5);
    for tau in [tau1, tau2] {
        if !tau.is_finite() || tau < half {
            return domain(format!("closed-form covariance needs tau > 1/2, got {tau}"));
        }
        if tau == half {
            return Err(Error::Degenerate(
                "tau = 1/2: the normalized cross sum grows like sqrt(2 tau - 1) (log k) k^((2 tau - 1)/2) and has no finite limit"
                    .into(),
            ));
        }
    }
    if tau1 == tau2 {
        return Ok(T::one());
    }
    let two = T::lit(2.0);
    let num = ((two * tau1 - T::one()) * (two * tau2 - T::one())).sqrt();
    Ok(num / (tau1 + tau2 - T::one()))
}

/// Finite-k covariance `Σ_{j≤k} f1(j) f2(j) j^{-2} / (σ_n(f1) σ_n(f2))`.
pub fn gamma_numeric<T: Real>(f1: &WeightFunction<T>, f2: &WeightFunction<T>, k: usize) -> Result<T> {
    check_k(k)?;
    if f1 == f2 {
        f1.check_support(k)?;
        return Ok(T::one());
    }
    let s1 = ratio_sums(f1, k)?;
    let s2 = ratio_sums(f2, k)?;
    let (scale1, scale2) = (s1.log_scale, s2.log_scale);
    let direct = scale1 == T::zero() && scale2 == T::zero();
    let mut cross = KahanSum::new();
    for j in 1..=k {
        let term = if direct {
            let jj = T::from_index(j);
            (f1.value(j) / jj) * (f2.value(j) / jj)
        } else {
            let lj = T::from_index(j).ln();
            (f1.ln_value(j) - lj - scale1).exp() * (f2.ln_value(j) - lj - scale2).exp()
        };
        cross.add(term);
    }
    let gamma = cross.value() / (s1.sum_sq * s2.sum_sq).sqrt();
    let slack = T::epsilon() * T::lit(64.0);
    if gamma > T::one() + slack {
        return Err(Error::Numeric(format!(
            "normalized inner product {gamma} exceeds 1 beyond rounding"
        )));
    }
    Ok(gamma.min(T::one()))
}

/// `ρ_n²(f1, f2) = E Σ_j (Z_{j,n}(f1) - Z_{j,n}(f2))² = 2 - 2 Γ_n(f1, f2)`.
pub fn rho_n_sq<T: Real>(f1: &WeightFunction<T>, f2: &WeightFunction<T>, k: usize) -> Result<T> {
    let g = gamma_numeric(f1, f2, k)?;
    Ok(T::lit(2.0) - T::lit(2.0) * g)
}

/// Random semimetric `Σ_{j≤k} (f1(j)/(jσ_n(f1)) - f2(j)/(jσ_n(f2)))² (e_j - 1)²`.
pub fn d_n_sq_random<T: Real>(
    f1: &WeightFunction<T>,
    f2: &WeightFunction<T>,
    k: usize,
    exp_draws: &[T],
) -> Result<T> {
    check_k(k)?;
    if exp_draws.len() != k {
        return Err(Error::InvalidInput(format!(
            "expected {k} exponential draws, got {}",
            exp_draws.len()
        )));
    }
    if let Some(bad) = exp_draws.iter().find(|e| !(**e >= T::zero())) {
        return Err(Error::InvalidInput(format!("exponential draw {bad} is negative")));
    }
    let s1 = ratio_sums(f1, k)?;
    let s2 = ratio_sums(f2, k)?;
    let (r1, r2) = (s1.sum_sq.sqrt(), s2.sum_sq.sqrt());
    let mut acc = KahanSum::new();
    for (j, e) in (1..=k).zip(exp_draws) {
        let lj = T::from_index(j).ln();
        let z1 = (f1.ln_value(j) - lj - s1.log_scale).exp() / r1;
        let z2 = (f2.ln_value(j) - lj - s2.log_scale).exp() / r2;
        let centred = *e - T::one();
        let d = z1 - z2;
        acc.add(d * d * centred * centred);
    }
    Ok(acc.value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_distr::{Distribution, Exp1};

    fn pow(t: f64) -> WeightFunction<f64> {
        WeightFunction::power(t).unwrap()
    }

    #[test]
    fn gamma_power_examples() {
        assert_eq!(gamma_power(0.8, 0.8).unwrap(), 1.0);
        assert!((gamma_power::<f64>(1.0, 0.75).unwrap() - 0.5f64.sqrt() / 0.75).abs() < 1e-15);
        assert!((gamma_power::<f64>(1.0, 0.75).unwrap() - 0.942809).abs() < 1e-6);
        assert!((gamma_power::<f64>(1.0, 10.0).unwrap() - 19f64.sqrt() / 10.0).abs() < 1e-15);
        assert!((gamma_power::<f64>(1.0, 10.0).unwrap() - 0.435890).abs() < 1e-6);
    }

    #[test]
    fn gamma_power_boundary_errors() {
        assert!(matches!(gamma_power(0.5, 1.0), Err(Error::Degenerate(_))));
        assert!(matches!(gamma_power(1.0, 0.5), Err(Error::Degenerate(_))));
        assert!(matches!(gamma_power(0.4, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn gamma_numeric_examples() {
        assert_eq!(gamma_numeric(&pow(0.3), &pow(0.3), 17).unwrap(), 1.0);
        let g = gamma_numeric(&pow(1.0), &pow(0.75), 100_000).unwrap();
        assert!((g - 0.9428).abs() < 0.002, "{g}");
        let f = pow(0.25);
        let f2 = WeightFunction::scaled(2.0, f.clone()).unwrap();
        let g = gamma_numeric(&f, &f2, 1000).unwrap();
        assert!((g - 1.0).abs() < 1e-14);
    }

    #[test]
    fn gamma_numeric_works_at_half() {
        let g = gamma_numeric(&pow(0.5), &pow(1.0), 10_000).unwrap();
        assert!(g > 0.0 && g < 1.0);
    }

    #[test]
    fn gamma_numeric_log_path_agrees_with_direct() {
        // f32 overflows j^16 and takes the log-scaled path.
        let f = WeightFunction::<f32>::power(16.0).unwrap();
        let g = WeightFunction::<f32>::power(12.0).unwrap();
        let lo = gamma_numeric(&f, &g, 5_000).unwrap();
        let hi = gamma_numeric(&pow(16.0), &pow(12.0), 5_000).unwrap();
        assert!((lo as f64 - hi).abs() < 1e-4, "{lo} vs {hi}");
        let limit = gamma_power::<f64>(16.0, 12.0).unwrap();
        assert!((hi - limit).abs() < 5e-3);
    }

    #[test]
    fn rho_examples() {
        assert_eq!(rho_n_sq(&pow(1.0), &pow(1.0), 50).unwrap(), 0.0);
        let r = rho_n_sq(&pow(1.0), &pow(0.75), 100_000).unwrap();
        assert!((r - 0.1144).abs() < 0.005, "{r}");
    }

    #[test]
    fn rho_matches_direct_sum_and_approaches_limit() {
        let limit = 2.0 - 2.0 * gamma_power::<f64>(0.9, 0.6).unwrap();
        assert!((limit - 0.4).abs() < 1e-15);
        let mut prev_err = f64::INFINITY;
        for k in [100usize, 1_000, 10_000, 100_000] {
            let (mut x, mut a, mut b) = (0.0, 0.0, 0.0);
            for j in 1..=k {
                let (p, q) = ((j as f64).powf(-0.1), (j as f64).powf(-0.4));
                x += p * q;
                a += p * p;
                b += q * q;
            }
            let oracle = 2.0 - 2.0 * x / (a * b).sqrt();
            let r = rho_n_sq(&pow(0.9), &pow(0.6), k).unwrap();
            assert!((r - oracle).abs() < 1e-12, "k={k}: {r} vs {oracle}");
            let err = (r - limit).abs();
            assert!(err < prev_err);
            prev_err = err;
        }
    }

    #[test]
    fn random_semimetric_trivial_cases() {
        let draws = vec![0.3, 2.0, 1.7];
        assert_eq!(d_n_sq_random(&pow(1.0), &pow(1.0), 3, &draws).unwrap(), 0.0);
        let ones = vec![1.0; 3];
        assert_eq!(d_n_sq_random(&pow(1.0), &pow(0.2), 3, &ones).unwrap(), 0.0);
        assert!(d_n_sq_random(&pow(1.0), &pow(0.2), 4, &ones).is_err());
        assert!(d_n_sq_random(&pow(1.0), &pow(0.2), 3, &[1.0, -0.1, 2.0]).is_err());
    }

    #[test]
    fn random_semimetric_mean_matches_rho() {
        let (f1, f2, k) = (pow(1.0), pow(0.6), 40);
        let target = rho_n_sq(&f1, &f2, k).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let reps = 10_000;
        let vals: Vec<f64> = (0..reps)
            .map(|_| {
                let e: Vec<f64> = (0..k).map(|_| Exp1.sample(&mut rng)).collect();
                d_n_sq_random(&f1, &f2, k, &e).unwrap()
            })
            .collect();
        let mean = vals.iter().sum::<f64>() / reps as f64;
        let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (reps - 1) as f64;
        let se = (var / reps as f64).sqrt();
        assert!((mean - target).abs() < 3.0 * se, "{mean} vs {target} (se {se})");
    }
}
