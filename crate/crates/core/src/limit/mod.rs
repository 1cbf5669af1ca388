//! Limit objects: the series law `𝓛(f)`, its cumulants and joint moment
//! generating function, and Gaussian finite-dimensional limits.

mod gaussian;
mod law;
mod mgf;

pub use gaussian::{gamma_matrix, gaussian_fidi_sample, PivotedCholesky, PIVOT_TOL};
pub use law::{cumulant_l, sample_limit_l, LimitLawSpec, DEFAULT_LIMIT_TOL};
pub use mgf::{mgf_l_joint, mgf_l_joint_eval, MgfEval, MgfFormula};
