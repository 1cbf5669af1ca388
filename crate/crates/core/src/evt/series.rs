//! Infinite series `A(m, f) = Σ_{j≥1} (f(j)/j)^m` with certified truncation.
//!
//! The partial sum runs to an index `J`; the remainder is summed in closed form
//! from the weight's monomial expansion with Euler–Maclaurin corrections. The
//! first omitted Euler–Maclaurin term bounds the error because `x^{-s}` is
//! completely monotone.

use crate::error::{domain, Error, Result};
use crate::evt::weights::{multiply_monomials, Monomial, WeightFunction};
use crate::scalar::{KahanSum, Real};

/// Outcome of summing a series that may diverge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SeriesValue<T> {
    Finite(T),
    Divergent,
}

impl<T: Copy> SeriesValue<T> {
    pub fn finite(self) -> Option<T> {
        match self {
            Self::Finite(v) => Some(v),
            Self::Divergent => None,
        }
    }

    pub fn is_divergent(&self) -> bool {
        matches!(self, Self::Divergent)
    }
}

/// Default absolute tolerance for series evaluation.
pub const DEFAULT_SERIES_TOL: f64 = 1e-9;

const MIN_CUTOFF: usize = 64;
const MAX_CUTOFF: usize = 1 << 26;

/// `Σ_{j>J} j^{-s}` for `s > 1`, with an upper bound on the absolute error.
pub fn power_tail_sum<T: Real>(cutoff: usize, s: T) -> Option<(T, T)> {
    if !(s > T::one()) || cutoff == 0 {
        return None;
    }
    let j = T::from_index(cutoff);
    let lj = j.ln();
    let one = T::one();
    let integral = ((one - s) * lj).exp() / (s - one);
    let f = (-s * lj).exp();
    let d1 = s * (-(s + one) * lj).exp() / T::lit(12.0);
    let d3 = s * (s + one) * (s + T::lit(2.0)) * (-(s + T::lit(3.0)) * lj).exp() / T::lit(720.0);
    let err = s
        * (s + one)
        * (s + T::lit(2.0))
        * (s + T::lit(3.0))
        * (s + T::lit(4.0))
        * (-(s + T::lit(5.0)) * lj).exp()
        / T::lit(30240.0);
    Some((integral - f / T::lit(2.0) + d1 - d3, err))
}

/// `Σ_{j>J} Σ_i c_i j^{e_i}`; `None` if some term has `e_i >= -1`.
pub(crate) fn monomial_tail_sum<T: Real>(cutoff: usize, terms: &[Monomial<T>]) -> Option<(T, T)> {
    let mut value = KahanSum::new();
    let mut err = T::zero();
    for &(c, e) in terms {
        let (v, r) = power_tail_sum(cutoff, -e)?;
        value.add(c * v);
        err += c.abs() * r;
    }
    Some((value.value(), err))
}

/// `(Σ c_i j^{e_i})^m`.
pub(crate) fn monomial_power<T: Real>(terms: &[Monomial<T>], m: u32) -> Vec<Monomial<T>> {
    let mut out = vec![(T::one(), T::zero())];
    for _ in 0..m {
        out = multiply_monomials(&out, terms);
    }
    out
}

/// Expansion of `(f(j)/j)^m` valid past the weight's table.
pub(crate) fn ratio_power_monomials<T: Real>(
    f: &WeightFunction<T>,
    m: u32,
) -> Result<(usize, Vec<Monomial<T>>)> {
    let (j0, terms) = f.tail_monomials().ok_or_else(|| {
        Error::Unsupported(format!(
            "weight {f} has no extension rule, so its infinite series is undefined"
        ))
    })?;
    let shifted: Vec<_> = terms.into_iter().map(|(c, e)| (c, e - T::one())).collect();
    Ok((j0, monomial_power(&shifted, m)))
}

/// Result of a certified series evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesEval<T> {
    pub value: T,
    /// Index where the explicit partial sum stops.
    pub cutoff: usize,
    /// Bound on the absolute truncation error.
    pub error_bound: T,
}

/// `Σ_{j≥1} (f(j)/j)^m`, with the partial sum stopped at a certified cutoff.
pub fn a_m_certified<T: Real>(
    f: &WeightFunction<T>,
    m: u32,
    tol: T,
) -> Result<SeriesValue<SeriesEval<T>>> {
    if m < 2 {
        return domain(format!("A(m, f) needs m >= 2, got {m}"));
    }
    if !(tol > T::zero()) {
        return domain("series tolerance must be positive");
    }
    let (j0, terms) = ratio_power_monomials(f, m)?;
    if terms.iter().any(|&(_, e)| e >= -T::one()) {
        return Ok(SeriesValue::Divergent);
    }
    let mut cutoff = j0.max(MIN_CUTOFF);
    let (tail, err) = loop {
        let (tail, err) = monomial_tail_sum(cutoff, &terms)
            .expect("exponents checked below -1");
        if err <= tol {
            break (tail, err);
        }
        if cutoff >= MAX_CUTOFF {
            return Err(Error::Numeric(format!(
                "A({m}, {f}) tail bound {err} still above tolerance {tol} at J={cutoff}"
            )));
        }
        cutoff *= 2;
    };
    let mut partial = KahanSum::new();
    for j in 1..=cutoff {
        partial.add((f.value(j) / T::from_index(j)).powi(m as i32));
    }
    Ok(SeriesValue::Finite(SeriesEval {
        value: partial.value() + tail,
        cutoff,
        error_bound: err,
    }))
}

/// `A(m, f) = Σ_{j≥1} f(j)^m j^{-m}`, or [`SeriesValue::Divergent`].
pub fn a_m<T: Real>(f: &WeightFunction<T>, m: u32, tol: T) -> Result<SeriesValue<T>> {
    Ok(match a_m_certified(f, m, tol)? {
        SeriesValue::Finite(e) => SeriesValue::Finite(e.value),
        SeriesValue::Divergent => SeriesValue::Divergent,
    })
}

/// `A(m, f)`, failing with a domain error when the series diverges.
pub fn a_m_finite<T: Real>(f: &WeightFunction<T>, m: u32, tol: T) -> Result<T> {
    match a_m(f, m, tol)? {
        SeriesValue::Finite(v) => Ok(v),
        SeriesValue::Divergent => domain(format!("A({m}, {f}) diverges")),
    }
}
