//! Weight functions, normalization constants, bias conditions and the limit
//! covariance of the studentized generalized Hill process.

mod conditions;
mod covariance;
mod norms;
mod series;
mod weights;

pub use conditions::{check_conditions, ConditionReport, SlowVaryFn};
pub use covariance::{d_n_sq_random, gamma_numeric, gamma_power, rho_n_sq};
pub use norms::{a_n, b_nf, sigma_n, weight_sum, NormalizationSet};
pub use series::{a_m, a_m_certified, a_m_finite, power_tail_sum, SeriesEval, SeriesValue, DEFAULT_SERIES_TOL};
pub use weights::{Extension, Monomial, WeightFunction};

pub(crate) use series::{monomial_power, monomial_tail_sum, ratio_power_monomials};
pub(crate) use weights::merge_monomials;
