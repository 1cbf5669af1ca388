//! Finite-k normalizations `a_n(f)`, `σ_n(f)` and `B(n, f)`.

use crate::error::{domain, Result};
use crate::evt::weights::WeightFunction;
use crate::scalar::{KahanSum, Real};

/// Normalization constants of `T_n(f)` for a fixed number of spacings `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizationSet<T> {
    pub k: usize,
    /// `Σ_{j≤k} f(j)/j`.
    pub a_n: T,
    /// `sqrt(Σ_{j≤k} (f(j)/j)²)`.
    pub sigma_n: T,
    /// `max_{j≤k} f(j)/j / σ_n`.
    pub b_nf: T,
    /// `max_{j≤k} f(j)/j`.
    pub max_ratio: T,
}

/// Sums of the ratios `r_j = f(j)/j`, all multiplied by `exp(-log_scale)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct RatioSums<T> {
    pub sum: T,
    pub sum_sq: T,
    pub max: T,
    pub log_scale: T,
}

pub(crate) fn check_k(k: usize) -> Result<()> {
    if k == 0 {
        return domain("k must be at least 1");
    }
    Ok(())
}

/// Direct sums when they fit in `T`, otherwise sums of `exp(ln r_j - M)` with
/// `M = max ln r_j`.
pub(crate) fn ratio_sums<T: Real>(f: &WeightFunction<T>, k: usize) -> Result<RatioSums<T>> {
    check_k(k)?;
    f.check_support(k)?;
    let mut sum = KahanSum::new();
    let mut sum_sq = KahanSum::new();
    let mut max = T::neg_infinity();
    for j in 1..=k {
        let r = f.value(j) / T::from_index(j);
        sum.add(r);
        sum_sq.add(r * r);
        if r > max {
            max = r;
        }
    }
    let direct = RatioSums {
        sum: sum.value(),
        sum_sq: sum_sq.value(),
        max,
        log_scale: T::zero(),
    };
    if direct.sum.is_finite() && direct.sum_sq.is_finite() && direct.max > T::min_positive_value() {
        return Ok(direct);
    }

    let log_ratio = |j: usize| f.ln_value(j) - T::from_index(j).ln();
    let m = (1..=k).map(log_ratio).fold(T::neg_infinity(), T::max);
    let mut sum = KahanSum::new();
    let mut sum_sq = KahanSum::new();
    for j in 1..=k {
        let r = (log_ratio(j) - m).exp();
        sum.add(r);
        sum_sq.add(r * r);
    }
    Ok(RatioSums {
        sum: sum.value(),
        sum_sq: sum_sq.value(),
        max: T::one(),
        log_scale: m,
    })
}

impl<T: Real> NormalizationSet<T> {
    pub fn compute(f: &WeightFunction<T>, k: usize) -> Result<Self> {
        let s = ratio_sums(f, k)?;
        let scale = s.log_scale.exp();
        let root = s.sum_sq.sqrt();
        Ok(Self {
            k,
            a_n: s.sum * scale,
            sigma_n: root * scale,
            b_nf: s.max / root,
            max_ratio: s.max * scale,
        })
    }
}

/// `a_n(f) = Σ_{j≤k} f(j)/j`.
pub fn a_n<T: Real>(f: &WeightFunction<T>, k: usize) -> Result<T> {
    Ok(NormalizationSet::compute(f, k)?.a_n)
}

/// `σ_n(f) = sqrt(Σ_{j≤k} f(j)²/j²)`.
pub fn sigma_n<T: Real>(f: &WeightFunction<T>, k: usize) -> Result<T> {
    Ok(NormalizationSet::compute(f, k)?.sigma_n)
}

/// `B(n, f) = σ_n(f)^{-1} max_{j≤k} f(j)/j`.
pub fn b_nf<T: Real>(f: &WeightFunction<T>, k: usize) -> Result<T> {
    Ok(NormalizationSet::compute(f, k)?.b_nf)
}

/// `Σ_{j≤k} f(j)`, the sum appearing in the bias conditions.
pub fn weight_sum<T: Real>(f: &WeightFunction<T>, k: usize) -> Result<T> {
    check_k(k)?;
    f.check_support(k)?;
    let direct: KahanSum<T> = (1..=k).map(|j| f.value(j)).collect();
    let v = direct.value();
    if v.is_finite() {
        return Ok(v);
    }
    let m = (1..=k).map(|j| f.ln_value(j)).fold(T::neg_infinity(), T::max);
    let scaled: KahanSum<T> = (1..=k).map(|j| (f.ln_value(j) - m).exp()).collect();
    Ok(scaled.value() * m.exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pow(t: f64) -> WeightFunction<f64> {
        WeightFunction::power(t).unwrap()
    }

    #[test]
    fn a_n_examples() {
        assert_eq!(a_n(&pow(1.0), 3).unwrap(), 3.0);
        assert!((a_n(&pow(0.0), 3).unwrap() - 11.0 / 6.0).abs() < 1e-15);
        assert_eq!(a_n(&pow(2.0), 2).unwrap(), 3.0);
    }

    #[test]
    fn sigma_n_examples() {
        assert!((sigma_n(&pow(1.0), 3).unwrap() - 3f64.sqrt()).abs() < 1e-15);
        let direct = (1.0 + 0.25 + 1.0 / 9.0 + 1.0 / 16.0_f64).sqrt();
        assert!((sigma_n(&pow(0.0), 4).unwrap() - direct).abs() < 1e-15);
        assert!((direct - 1.193152).abs() < 1e-6);
    }

    #[test]
    fn sigma_n_quarter_power_approaches_zeta_three_halves() {
        // ζ(1.5) minus the tail Σ_{j>k} j^{-3/2} ≈ 2/sqrt(k).
        let s = sigma_n(&pow(0.25), 1_000_000).unwrap();
        let zeta = 2.612_375_348_685_488_f64;
        let expected = (zeta - 2.0 / 1000.0).sqrt();
        assert!((s - expected).abs() < 1e-5, "{s}");
        assert!((s - 1.616).abs() < 2e-3);
    }

    #[test]
    fn b_nf_examples() {
        assert!((b_nf(&pow(1.0), 100).unwrap() - 0.1).abs() < 1e-15);
        assert!((b_nf(&pow(1.0), 4).unwrap() - 0.5).abs() < 1e-15);
        let b = b_nf(&pow(0.25), 1_000_000).unwrap();
        assert!((b - 0.6187).abs() < 2e-3, "{b}");
    }

    #[test]
    fn k_zero_rejected() {
        assert!(a_n(&pow(1.0), 0).is_err());
        assert!(sigma_n(&pow(1.0), 0).is_err());
    }

    #[test]
    fn huge_exponent_uses_log_scale_for_f32() {
        let f = WeightFunction::<f32>::power(16.0).unwrap();
        let n = NormalizationSet::compute(&f, 10_000).unwrap();
        assert!(n.b_nf.is_finite() && n.b_nf > 0.0 && n.b_nf <= 1.0);
        // b = 1 / sqrt(Σ (j/k)^30) ≈ sqrt(31 / k).
        assert!((n.b_nf - (31.0_f32 / 10_000.0).sqrt()).abs() < 2e-3, "{}", n.b_nf);
    }

    #[test]
    fn tau_sixteen_large_k_stays_finite_in_f64() {
        let f = pow(16.0);
        let n = NormalizationSet::compute(&f, 2_000_000).unwrap();
        assert!(n.sigma_n.is_finite() && n.a_n.is_finite());
        let sq = n.sigma_n * n.sigma_n;
        assert!(sq.is_finite());
        assert!(sq <= n.a_n * n.max_ratio * (1.0 + 1e-12));
    }

    #[test]
    fn weight_sum_power_one() {
        assert_eq!(weight_sum(&pow(1.0), 100).unwrap(), 5050.0);
    }
}
