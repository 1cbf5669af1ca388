//! Slowly varying perturbations `p`, `b` and the bias-condition evaluator.

use std::fmt;
use std::sync::Arc;

use crate::error::{domain, Error, Result};
use crate::evt::norms::{sigma_n, weight_sum};
use crate::evt::weights::WeightFunction;
use crate::quad;
use crate::scalar::Real;

type Callable<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// A perturbation `u ↦ p(u)` on `(0, 1]` vanishing at zero.
#[derive(Clone)]
pub enum SlowVaryFn<T> {
    /// `c · u^β` with `β > 0`.
    Power { c: T, beta: T },
    /// Any callable; sups and integrals are taken numerically.
    Custom(Callable<T>),
}

const SUP_GRID: usize = 2000;

impl<T: Real> SlowVaryFn<T> {
    pub fn power(c: T, beta: T) -> Result<Self> {
        if !c.is_finite() {
            return Err(Error::InvalidInput(format!("perturbation coefficient {c} is not finite")));
        }
        if !(beta.is_finite() && beta > T::zero()) {
            return Err(Error::InvalidInput(format!(
                "perturbation exponent must be positive, got {beta}"
            )));
        }
        Ok(Self::Power { c, beta })
    }

    pub fn zero() -> Self {
        Self::Power {
            c: T::zero(),
            beta: T::one(),
        }
    }

    pub fn custom(g: impl Fn(T) -> T + Send + Sync + 'static) -> Self {
        Self::Custom(Arc::new(g))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Self::Power { c, .. } if *c == T::zero())
    }

    pub fn eval(&self, u: T) -> T {
        match self {
            Self::Power { c, beta } => {
                if *c == T::zero() {
                    T::zero()
                } else {
                    *c * u.powf(*beta)
                }
            }
            Self::Custom(g) => g(u),
        }
    }

    /// `p(u)` given `ln u`, so that `u` below the smallest normal number is fine.
    pub fn eval_ln(&self, ln_u: T) -> T {
        match self {
            Self::Power { c, beta } => {
                if *c == T::zero() {
                    T::zero()
                } else {
                    *c * (*beta * ln_u).exp()
                }
            }
            Self::Custom(g) => g(ln_u.exp()),
        }
    }

    /// `sup_{0<u≤upper} |p(u)|`.
    pub fn sup_abs(&self, upper: T) -> T {
        match self {
            Self::Power { c, beta } => c.abs() * upper.powf(*beta),
            Self::Custom(g) => {
                // Geometric grid down to upper·1e-12, endpoint included.
                let span = T::lit(12.0) * T::LN_10();
                let ln_upper = upper.ln();
                (0..=SUP_GRID)
                    .map(|i| {
                        let x = ln_upper - span * T::from_index(i) / T::from_index(SUP_GRID);
                        g(x.exp()).abs()
                    })
                    .fold(T::zero(), T::max)
            }
        }
    }

    /// `∫_u^1 b(t)/t dt` from `ln u`.
    pub fn log_integral(&self, ln_u: T) -> Result<T> {
        match self {
            Self::Power { c, beta } => {
                if *c == T::zero() {
                    return Ok(T::zero());
                }
                // c (1 - u^β) / β, with 1 - u^β = -expm1(β ln u).
                Ok(-*c * (*beta * ln_u).exp_m1() / *beta)
            }
            Self::Custom(g) => {
                // t = e^x: ∫_{ln u}^0 b(e^x) dx.
                quad::integrate(|x: T| g(x.exp()), ln_u, T::zero(), T::lit(1e-10), T::lit(1e-300))
            }
        }
    }
}

impl<T: fmt::Debug> fmt::Debug for SlowVaryFn<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Power { c, beta } => f
                .debug_struct("Power")
                .field("c", c)
                .field("beta", beta)
                .finish(),
            Self::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl<T: num_traits::Zero + PartialEq> PartialEq for SlowVaryFn<T> {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Self::Power { c: a, beta: b }, Self::Power { c: x, beta: y }) => {
                (*a == T::zero() && *x == T::zero()) || (a == x && b == y)
            }
            (Self::Custom(a), Self::Custom(b)) => Arc::ptr_eq(a, b),
            _ => false,
        }
    }
}

/// Values of `g_{1,n}`, `g_{2,n}`, `d_n` and the products in the bias conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionReport<T> {
    pub g1: T,
    pub g2: T,
    /// `max(g1, g2 log k)`.
    pub d: T,
    pub ratio_c1: T,
    pub ratio_c2: T,
    pub ratio_c3: T,
}

/// Evaluates the bias conditions at `(n, k, λ)`.
///
/// All three products use the normalization `σ_n(f)^{-1} Σ_{j≤k} f(j)`.
pub fn check_conditions<T: Real>(
    p: &SlowVaryFn<T>,
    b: &SlowVaryFn<T>,
    f: &WeightFunction<T>,
    n: usize,
    k: usize,
    lambda: T,
) -> Result<ConditionReport<T>> {
    if k == 0 || k > n {
        return domain(format!("need 1 <= k <= n, got k={k}, n={n}"));
    }
    if !(lambda > T::one()) {
        return domain(format!("lambda must exceed 1, got {lambda}"));
    }
    let upper = lambda * T::from_index(k) / T::from_index(n);
    if upper > T::one() {
        return domain(format!("lambda k / n = {upper} exceeds 1"));
    }
    let g1 = p.sup_abs(upper);
    let g2 = b.sup_abs(upper);
    let d = g1.max(g2 * T::from_index(k).ln());
    let norm = weight_sum(f, k)? / sigma_n(f, k)?;
    Ok(ConditionReport {
        g1,
        g2,
        d,
        ratio_c1: g1 * norm,
        ratio_c2: g2 * norm,
        ratio_c3: d * norm,
    })
}
