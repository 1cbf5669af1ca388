//! The series law `𝓛(f) = A(2,f)^{-1/2} Σ_{j≥1} f(j) j^{-1} (E_j - 1)`.

use rand_distr::{Distribution, Exp1, StandardNormal};
use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::evt::{
    a_m_certified, monomial_power, monomial_tail_sum, ratio_power_monomials, Monomial, SeriesValue,
    WeightFunction,
};
use crate::scalar::{KahanSum, Real};
use crate::tail::RngStream;

const MIN_CUTOFF: usize = 64;
const MAX_CUTOFF: usize = 1 << 26;

/// Default tolerance for [`LimitLawSpec::new`].
pub const DEFAULT_LIMIT_TOL: f64 = 1e-6;

/// A sampling plan for `𝓛(f)`.
///
/// Terms `j ≤ J` are drawn exactly. The remainder `Σ_{j>J}` is replaced by a
/// centred Gaussian of the same variance, so the sampled law has unit variance
/// and its third cumulant is off by at most `cumulant_bound`.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitLawSpec<T> {
    f: WeightFunction<T>,
    truncation_j: usize,
    a2: T,
    coeffs: Vec<T>,
    tail_sd: T,
    tail_variance: T,
    tail_var_bound: T,
    cumulant_bound: T,
}

/// Monomial expansion of `f(j)/j` past `J0`; a domain error when `A(2,f)` diverges.
pub(crate) fn ratio_monomials<T: Real>(f: &WeightFunction<T>) -> Result<(usize, Vec<Monomial<T>>)> {
    let (_, sq) = ratio_power_monomials(f, 2)?;
    if sq.iter().any(|&(_, e)| e >= -T::one()) {
        return domain(format!("A(2, {f}) diverges: the series law needs a square-summable f(j)/j"));
    }
    ratio_power_monomials(f, 1)
}

fn abs_monomials<T: Real>(terms: &[Monomial<T>]) -> Vec<Monomial<T>> {
    terms.iter().map(|&(c, e)| (c.abs(), e)).collect()
}

fn ratio<T: Real>(f: &WeightFunction<T>, j: usize) -> T {
    f.value(j) / T::from_index(j)
}

/// `A(2, f)` to relative accuracy `rel_tol`.
pub(crate) fn a2_relative<T: Real>(f: &WeightFunction<T>, rel_tol: T) -> Result<T> {
    let (j0, ratio_terms) = ratio_monomials(f)?;
    let start = j0.max(MIN_CUTOFF);
    let sq = monomial_power(&ratio_terms, 2);
    let mut head = KahanSum::new();
    for j in 1..=start {
        head.add(ratio(f, j).powi(2));
    }
    let (tail, _) = monomial_tail_sum(start, &sq).expect("exponents checked");
    let reference = head.value() + tail;
    if !(reference > T::zero()) {
        return Err(Error::Degenerate(format!("A(2, {f}) vanishes")));
    }
    match a_m_certified(f, 2, rel_tol * reference)? {
        SeriesValue::Finite(e) => Ok(e.value),
        SeriesValue::Divergent => domain(format!("A(2, {f}) diverges")),
    }
}

impl<T: Real> LimitLawSpec<T> {
    /// Picks `J` so that the third cumulant of the Gaussian-compensated law is
    /// within `tol` of `κ3(f)` and the variance is certified to `tol`.
    pub fn new(f: WeightFunction<T>, tol: T) -> Result<Self> {
        if !(tol > T::zero()) {
            return domain("truncation tolerance must be positive");
        }
        let (j0, ratio_terms) = ratio_monomials(&f)?;
        let sq = monomial_power(&ratio_terms, 2);
        let cube_abs = monomial_power(&abs_monomials(&ratio_terms), 3);
        let start = j0.max(MIN_CUTOFF);

        // Reference scale: every comparison below is homogeneous in f, so
        // multiplying f by a power of two leaves all decisions unchanged.
        let mut head = KahanSum::new();
        for j in 1..=start {
            head.add(ratio(&f, j).powi(2));
        }
        let reference = head.value() + monomial_tail_sum(start, &sq).expect("exponents checked").0;
        if !(reference > T::zero()) {
            return Err(Error::Degenerate(format!("A(2, {f}) vanishes")));
        }
        let ref_cube = reference * reference.sqrt();
        let two = T::lit(2.0);

        let mut cutoff = start;
        loop {
            let (_, sq_err) = monomial_tail_sum(cutoff, &sq).expect("exponents checked");
            let cube = match monomial_tail_sum(cutoff, &cube_abs) {
                Some((v, e)) => v + e,
                None => T::infinity(),
            };
            if two * cube <= tol * ref_cube && sq_err <= tol * reference {
                break;
            }
            if cutoff >= MAX_CUTOFF {
                return Err(Error::Numeric(format!(
                    "series law for {f}: tolerance {tol} needs more than {MAX_CUTOFF} exact terms"
                )));
            }
            cutoff *= 2;
        }
        Self::build(f, cutoff, true)
    }

    /// Plain truncation at `J` with no Gaussian compensation: the draws are
    /// exactly `A(2,f)^{-1/2} Σ_{j≤J} f(j)/j (e_j - 1)`.
    pub fn truncated(f: WeightFunction<T>, truncation_j: usize) -> Result<Self> {
        if truncation_j == 0 {
            return domain("truncation index must be at least 1");
        }
        let (j0, _) = ratio_monomials(&f)?;
        if truncation_j < j0 {
            return domain(format!("truncation index {truncation_j} is inside the weight table (length {j0})"));
        }
        Self::build(f, truncation_j, false)
    }

    fn build(f: WeightFunction<T>, cutoff: usize, compensate: bool) -> Result<Self> {
        let (_, ratio_terms) = ratio_monomials(&f)?;
        let sq = monomial_power(&ratio_terms, 2);
        let cube = monomial_power(&abs_monomials(&ratio_terms), 3);
        let raw: Vec<T> = (1..=cutoff).map(|j| ratio(&f, j)).collect();
        let partial: T = raw.iter().map(|r| *r * *r).collect::<KahanSum<T>>().value();
        let (tail, tail_err) = monomial_tail_sum(cutoff, &sq).expect("exponents checked");
        let tail = tail.max(T::zero());
        let a2 = partial + tail;
        if !(a2 > T::zero()) {
            return Err(Error::Degenerate(format!("A(2, {f}) vanishes")));
        }
        let norm = a2.sqrt();
        let coeffs = raw.into_iter().map(|r| r / norm).collect();
        let tail_variance = tail / a2;
        let (cube_tail, cube_err) = monomial_tail_sum(cutoff, &cube).unwrap_or((T::infinity(), T::zero()));
        let cumulant_bound = T::lit(2.0) * (cube_tail + cube_err) / (a2 * norm);
        let (tail_sd, tail_var_bound) = if compensate {
            (tail_variance.sqrt(), tail_err / a2)
        } else {
            (T::zero(), (tail + tail_err) / a2)
        };
        Ok(Self {
            f,
            truncation_j: cutoff,
            a2,
            coeffs,
            tail_sd,
            tail_variance,
            tail_var_bound,
            cumulant_bound,
        })
    }

    pub fn weight(&self) -> &WeightFunction<T> {
        &self.f
    }

    /// Number of exponential terms drawn exactly.
    pub fn truncation_j(&self) -> usize {
        self.truncation_j
    }

    /// `A(2, f)`.
    pub fn a2(&self) -> T {
        self.a2
    }

    /// Normalized variance `Σ_{j>J} (f(j)/j)² / A(2,f)` of the omitted terms.
    pub fn tail_variance(&self) -> T {
        self.tail_variance
    }

    /// Certified bound on `|1 - Var|` of the sampled law.
    pub fn tail_var_bound(&self) -> T {
        self.tail_var_bound
    }

    /// Bound on the third-cumulant error of the sampled law.
    pub fn cumulant_bound(&self) -> T {
        self.cumulant_bound
    }

    /// Whether the omitted terms are replaced by a Gaussian.
    pub fn is_compensated(&self) -> bool {
        self.tail_sd > T::zero()
    }

    /// One draw from the generator; consumes `J` exponentials and, when
    /// compensated, one normal.
    pub fn draw(&self, gen: &mut rand_chacha::ChaCha8Rng) -> T {
        let mut acc = T::zero();
        for &c in &self.coeffs {
            let e: f64 = Exp1.sample(gen);
            acc += c * (T::lit(e) - T::one());
        }
        if self.tail_sd > T::zero() {
            let z: f64 = StandardNormal.sample(gen);
            acc += self.tail_sd * T::lit(z);
        }
        acc
    }
}

/// `count` independent draws of `𝓛(f)`; draw `i` uses `rng.child(i)`.
pub fn sample_limit_l<T: Real>(spec: &LimitLawSpec<T>, rng: RngStream, count: usize) -> Result<Vec<T>> {
    if count == 0 {
        return domain("draw count must be at least 1");
    }
    Ok((0..count as u64)
        .into_par_iter()
        .map(|i| spec.draw(&mut rng.child(i).generator()))
        .collect())
}

/// `κ_m(𝓛(f)) = (m-1)! A(m,f) A(2,f)^{-m/2}`, accurate to `tol`.
pub fn cumulant_l<T: Real>(f: &WeightFunction<T>, order: u32, tol: T) -> Result<T> {
    if order < 2 {
        return domain(format!("cumulant order must be at least 2, got {order}"));
    }
    if !(tol > T::zero()) {
        return domain("cumulant tolerance must be positive");
    }
    let a2 = a2_relative(f, tol * T::lit(1e-3))?;
    if order == 2 {
        return Ok(T::one());
    }
    let fact: T = (1..order).map(|i| T::from_index(i as usize)).fold(T::one(), |a, b| a * b);
    let scale = a2.powf(T::lit(order as f64 / 2.0));
    let am = match a_m_certified(f, order, tol * scale / (fact * T::lit(4.0)))? {
        SeriesValue::Finite(e) => e.value,
        SeriesValue::Divergent => return domain(format!("A({order}, {f}) diverges")),
    };
    Ok(fact * am / scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn pow(t: f64) -> WeightFunction<f64> {
        WeightFunction::power(t).unwrap()
    }

    fn zeta(s: f64) -> f64 {
        // Partial sum plus Euler–Maclaurin tail, independent of the library.
        let n = 2000usize;
        let head: f64 = (1..=n).map(|j| (j as f64).powf(-s)).sum();
        let x = n as f64;
        head + x.powf(1.0 - s) / (s - 1.0) - x.powf(-s) / 2.0 + s * x.powf(-s - 1.0) / 12.0
    }

    fn moments(v: &[f64]) -> (f64, f64, f64) {
        let n = v.len() as f64;
        let m = v.iter().sum::<f64>() / n;
        let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
        let skew = v.iter().map(|x| (x - m).powi(3)).sum::<f64>() / n / var.powf(1.5);
        (m, var, skew)
    }

    #[test]
    fn cumulant_examples() {
        assert_eq!(cumulant_l(&pow(0.3), 2, 1e-9).unwrap(), 1.0);
        let k3 = cumulant_l(&pow(0.0), 3, 1e-10).unwrap();
        let oracle = 2.0 * zeta(3.0) / zeta(2.0).powf(1.5);
        assert!((k3 - oracle).abs() < 1e-9, "{k3} vs {oracle}");
        assert!((k3 - 1.13955).abs() < 1e-5);
        let k4 = cumulant_l(&pow(0.0), 4, 1e-10).unwrap();
        let oracle = 6.0 * (PI.powi(4) / 90.0) / (PI * PI / 6.0).powi(2);
        assert!((k4 - oracle).abs() < 1e-9);
        assert!((k4 - 2.4).abs() < 1e-9);
    }

    #[test]
    fn cumulant_rejects_divergent_weight() {
        assert!(matches!(cumulant_l(&pow(0.5), 3, 1e-6), Err(Error::Domain(_))));
        assert!(matches!(LimitLawSpec::new(pow(1.0), 1e-6), Err(Error::Domain(_))));
    }

    #[test]
    fn spec_certificates_hold() {
        for tau in [0.0, 0.1, 0.25, 0.4] {
            let spec = LimitLawSpec::new(pow(tau), 1e-4).unwrap();
            assert!(spec.tail_var_bound() <= 1e-4);
            assert!(spec.cumulant_bound() <= 1e-4);
            let a2 = zeta(2.0 - 2.0 * tau);
            assert!((spec.a2() - a2).abs() < 1e-8 * a2, "tau={tau}");
            // Integral bound on the omitted variance.
            let j = spec.truncation_j() as f64;
            let bound = j.powf(2.0 * tau - 1.0) / (1.0 - 2.0 * tau) / a2;
            assert!(spec.tail_variance() <= bound);
        }
    }

    #[test]
    fn truncated_spec_reports_missing_variance() {
        let spec = LimitLawSpec::truncated(pow(0.0), 100).unwrap();
        assert!(!spec.is_compensated());
        let missing = (zeta(2.0) - (1..=100).map(|j| 1.0 / (j * j) as f64).sum::<f64>()) / zeta(2.0);
        assert!(spec.tail_var_bound() >= missing * (1.0 - 1e-12), "{} vs {missing}", spec.tail_var_bound());
        assert!(spec.tail_var_bound() < missing * 1.001);
    }

    #[test]
    fn draws_reproducible_and_scale_invariant() {
        let f = pow(0.25);
        let spec = LimitLawSpec::new(f.clone(), 1e-4).unwrap();
        let spec2 = LimitLawSpec::new(WeightFunction::scaled(2.0, f).unwrap(), 1e-4).unwrap();
        let a = sample_limit_l(&spec, RngStream::new(3, 1), 50).unwrap();
        let b = sample_limit_l(&spec2, RngStream::new(3, 1), 50).unwrap();
        assert_eq!(a, b);
        let seq: Vec<f64> = (0..50).map(|i| spec.draw(&mut RngStream::new(3, 1).child(i).generator())).collect();
        assert_eq!(a, seq);
    }

    #[test]
    fn moments_of_power_zero() {
        let spec = LimitLawSpec::new(pow(0.0), 1e-6).unwrap();
        let draws = sample_limit_l(&spec, RngStream::new(42, 0), 100_000).unwrap();
        let (m, v, s) = moments(&draws);
        assert!(m.abs() < 3.0 / 100_000f64.sqrt(), "{m}");
        assert!((v - 1.0).abs() < 0.02, "{v}");
        assert!((s - 1.1397).abs() < 0.05, "{s}");
    }

    #[test]
    fn unit_variance_on_grid() {
        for (i, tau) in [0.1, 0.25, 0.4].into_iter().enumerate() {
            let spec = LimitLawSpec::new(pow(tau), 1e-3).unwrap();
            let draws = sample_limit_l(&spec, RngStream::new(7, i as u64), 20_000).unwrap();
            let (_, v, _) = moments(&draws);
            // sd of the sample variance ≈ sqrt((κ4 + 2)/n).
            let k4 = cumulant_l(&pow(tau), 4, 1e-8).unwrap();
            let se = ((k4 + 2.0) / 20_000.0).sqrt();
            assert!((v - 1.0).abs() < 4.0 * se + spec.tail_var_bound(), "tau={tau}: {v}");
        }
    }
}
