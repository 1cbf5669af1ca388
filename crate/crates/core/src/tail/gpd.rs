//! The extremal family `G_γ(x) = exp(-(1 + γx)^{-1/γ})`, `G_0(x) = exp(-e^{-x})`.

use crate::error::{domain, Result};
use crate::scalar::Real;

/// `x` with `G_γ(x) = q`.
pub fn gpd_quantile<T: Real>(gamma: T, q: T) -> Result<T> {
    if !(q > T::zero() && q < T::one()) {
        return domain(format!("quantile level {q} outside (0, 1)"));
    }
    Ok(quantile_from_neg_ln(gamma, -q.ln()))
}

/// Quantile expressed through `w = -ln q > 0`.
pub(crate) fn quantile_from_neg_ln<T: Real>(gamma: T, w: T) -> T {
    if gamma == T::zero() {
        -w.ln()
    } else {
        // (w^{-γ} - 1) / γ = expm1(-γ ln w) / γ
        (-gamma * w.ln()).exp_m1() / gamma
    }
}

/// `G_γ(x)`; 0 below and 1 above the support.
pub fn gpd_cdf<T: Real>(gamma: T, x: T) -> T {
    if gamma == T::zero() {
        return (-(-x).exp()).exp();
    }
    let z = T::one() + gamma * x;
    if z <= T::zero() {
        return if gamma > T::zero() { T::zero() } else { T::one() };
    }
    (-(-(z.ln()) / gamma).exp()).exp()
}
