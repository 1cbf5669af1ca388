//! The functional generalized Hill process
//! `T_n(f) = Σ_{j≤k} f(j) (log X_{n-j+1,n} - log X_{n-j,n})`
//! for extreme-value-index estimation, its Gaussian and non-Gaussian limits,
//! and a Monte Carlo harness checking the convergence statements.
//!
//! Numeric code is generic over [`Real`] (`f32` or `f64`); the aliases at the
//! crate root fix the scalar to `f64`.

pub mod diagnostics;
pub mod error;
pub mod estimators;
pub mod evt;
pub mod limit;
mod quad;
pub mod scalar;
pub mod tail;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Weight = evt::WeightFunction<f64>;
pub type SlowVary = evt::SlowVaryFn<f64>;
pub type Normalization = evt::NormalizationSet<f64>;
pub type Conditions = evt::ConditionReport<f64>;
pub type Model = tail::TailModel<f64>;
pub type Sample = estimators::OrderedSample<f64>;
pub type Ghp = estimators::GhpResult<f64>;
pub type LimitLaw = limit::LimitLawSpec<f64>;
