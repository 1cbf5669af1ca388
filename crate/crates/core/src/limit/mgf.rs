//! Joint moment generating function of `(𝓛(f_1), ..., 𝓛(f_S))`.

use std::fmt;
use std::str::FromStr;

use crate::error::{domain, Error, Result};
use crate::evt::{merge_monomials, monomial_power, monomial_tail_sum, Monomial, WeightFunction};
use crate::limit::law::{a2_relative, ratio_monomials};
use crate::scalar::{KahanSum, Real};

const MIN_CUTOFF: usize = 64;
const MAX_CUTOFF: usize = 1 << 26;

/// Which product to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MgfFormula {
    /// `Π_j e^{-w_j} / (1 - w_j)` with `w_j = Σ_s t_s A(2,f_s)^{-1/2} f_s(j)/j`.
    #[default]
    Derived,
    /// `Π_j e^{v_j} (1 - v_j)` with the unnormalized `v_j = Σ_s t_s f_s(j)/j`.
    Printed,
}

impl fmt::Display for MgfFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Derived => "derived",
            Self::Printed => "printed",
        })
    }
}

impl FromStr for MgfFormula {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "derived" => Ok(Self::Derived),
            "printed" => Ok(Self::Printed),
            other => Err(Error::Config(format!("unknown formula '{other}' (derived|printed)"))),
        }
    }
}

/// Value of the product with its truncation data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MgfEval<T> {
    pub value: T,
    pub ln_value: T,
    /// Factors `j ≤ cutoff` are multiplied explicitly.
    pub cutoff: usize,
    /// Bound on the error of `ln_value` from the remaining factors.
    pub ln_error_bound: T,
}

/// `E exp(Σ_s t_s 𝓛(f_s))` (or the printed variant), certified to `tol` in log scale.
pub fn mgf_l_joint_eval<T: Real>(
    f_list: &[WeightFunction<T>],
    t: &[T],
    tol: T,
    formula: MgfFormula,
) -> Result<MgfEval<T>> {
    if f_list.is_empty() {
        return domain("need at least one weight");
    }
    if f_list.len() != t.len() {
        return Err(Error::InvalidInput(format!(
            "{} weights but {} arguments",
            f_list.len(),
            t.len()
        )));
    }
    if let Some(bad) = t.iter().find(|x| !x.is_finite()) {
        return domain(format!("argument {bad} is not finite"));
    }
    if !(tol > T::zero()) {
        return domain("tolerance must be positive");
    }

    let mut factors = Vec::with_capacity(f_list.len());
    let mut j0 = 0;
    let mut w_terms = Vec::new();
    for (f, &ts) in f_list.iter().zip(t) {
        let (j, terms) = ratio_monomials(f)?;
        let norm = match formula {
            MgfFormula::Derived => a2_relative(f, T::lit(1e-3) * tol)?.sqrt().recip(),
            MgfFormula::Printed => T::one(),
        };
        let factor = ts * norm;
        j0 = j0.max(j);
        w_terms.extend(terms.into_iter().map(|(c, e)| (factor * c, e)));
        factors.push(factor);
    }
    let w_terms: Vec<Monomial<T>> = merge_monomials(w_terms);
    let w_abs: Vec<Monomial<T>> = w_terms.iter().map(|&(c, e)| (c.abs(), e)).collect();
    let w_sq = monomial_power(&w_terms, 2);
    let w_cube = monomial_power(&w_abs, 3);
    let half = T::lit(0.5);

    // Past the cutoff |w_j| ≤ 1/2, where |-w - ln(1-w) - w²/2| ≤ (2/3)|w|³.
    let mut cutoff = j0.max(MIN_CUTOFF);
    let (tail, err) = loop {
        let bound_next = w_abs
            .iter()
            .map(|&(c, e)| c * T::from_index(cutoff + 1).powf(e))
            .fold(T::zero(), |a, b| a + b);
        if bound_next <= half {
            let (sq, sq_err) = monomial_tail_sum(cutoff, &w_sq).unwrap_or((T::zero(), T::zero()));
            let (cube, cube_err) = monomial_tail_sum(cutoff, &w_cube).unwrap_or((T::zero(), T::zero()));
            let err = half * sq_err + T::lit(2.0 / 3.0) * (cube + cube_err);
            if err <= tol {
                break (half * sq, err);
            }
        }
        if cutoff >= MAX_CUTOFF {
            return Err(Error::Numeric(format!(
                "product tail bound still above {tol} at j={MAX_CUTOFF}"
            )));
        }
        cutoff *= 2;
    };

    let mut acc = KahanSum::new();
    for j in 1..=cutoff {
        let jj = T::from_index(j);
        let w = f_list
            .iter()
            .zip(&factors)
            .map(|(f, &a)| a * f.value(j) / jj)
            .fold(T::zero(), |x, y| x + y);
        if !(w < T::one()) {
            return domain(format!(
                "argument outside the domain: w_{j} = {w} >= 1 (smallest offending index j = {j})"
            ));
        }
        let ln1m = (-w).ln_1p();
        acc.add(match formula {
            MgfFormula::Derived => -w - ln1m,
            MgfFormula::Printed => w + ln1m,
        });
    }
    let ln_value = match formula {
        MgfFormula::Derived => acc.value() + tail,
        MgfFormula::Printed => acc.value() - tail,
    };
    Ok(MgfEval {
        value: ln_value.exp(),
        ln_value,
        cutoff,
        ln_error_bound: err,
    })
}

/// `E exp(Σ_s t_s 𝓛(f_s)) = Π_{j≥1} e^{-w_j} / (1 - w_j)`.
pub fn mgf_l_joint<T: Real>(f_list: &[WeightFunction<T>], t: &[T], tol: T) -> Result<T> {
    Ok(mgf_l_joint_eval(f_list, t, tol, MgfFormula::Derived)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::limit::{cumulant_l, sample_limit_l, LimitLawSpec};
    use crate::tail::RngStream;

    fn pow(t: f64) -> WeightFunction<f64> {
        WeightFunction::power(t).unwrap()
    }

    fn ln_mgf(t: f64) -> f64 {
        mgf_l_joint_eval(&[pow(0.0)], &[t], 1e-13, MgfFormula::Derived).unwrap().ln_value
    }

    #[test]
    fn origin_is_one() {
        assert_eq!(mgf_l_joint(&[pow(0.0), pow(0.3)], &[0.0, 0.0], 1e-10).unwrap(), 1.0);
        let p = mgf_l_joint_eval(&[pow(0.2)], &[0.0], 1e-10, MgfFormula::Printed).unwrap();
        assert_eq!(p.value, 1.0);
    }

    #[test]
    fn small_argument_matches_cumulant_expansion() {
        // Independent oracle: Σ_j -w - ln(1-w) summed far out, w = t/(ζ(2)^{1/2} j).
        let a = (std::f64::consts::PI.powi(2) / 6.0).sqrt().recip();
        let t = 0.1;
        let direct: f64 = (1..=2_000_000).map(|j| {
            let w = t * a / j as f64;
            -w - (-w).ln_1p()
        }).sum::<f64>() + (t * a).powi(2) / 2.0 / 2_000_000.0;
        let v = ln_mgf(t);
        assert!((v - direct).abs() < 1e-10, "{v} vs {direct}");
        assert!((v - 0.0052006).abs() < 1e-7, "{v}");
        let k3 = cumulant_l(&pow(0.0), 3, 1e-10).unwrap();
        let k4 = cumulant_l(&pow(0.0), 4, 1e-10).unwrap();
        let series = t * t / 2.0 + k3 * t.powi(3) / 6.0 + k4 * t.powi(4) / 24.0;
        assert!((v - series).abs() < 1e-6, "{v} vs {series}");
    }

    #[test]
    fn derivatives_match_cumulants() {
        let h = 1e-3;
        let (m, z, p) = (ln_mgf(-h), ln_mgf(0.0), ln_mgf(h));
        let second = (p - 2.0 * z + m) / (h * h);
        assert!((second - 1.0).abs() < 1e-4, "{second}");
        let (m2, p2) = (ln_mgf(-2.0 * h), ln_mgf(2.0 * h));
        let third = (p2 - 2.0 * p + 2.0 * m - m2) / (2.0 * h.powi(3));
        let k3 = cumulant_l(&pow(0.0), 3, 1e-10).unwrap();
        assert!((third - k3).abs() < 1e-3, "{third} vs {k3}");
    }

    #[test]
    fn domain_error_names_first_index() {
        // w_1 = t / sqrt(ζ(2)) ≥ 1 for t = 2.
        match mgf_l_joint(&[pow(0.0)], &[2.0], 1e-8) {
            Err(Error::Domain(msg)) => assert!(msg.contains("j = 1)"), "{msg}"),
            other => panic!("{other:?}"),
        }
        let err = mgf_l_joint_eval(&[pow(0.0)], &[1.2], 1e-8, MgfFormula::Printed).unwrap_err();
        assert!(err.to_string().contains("j = 1)"));
        assert!(mgf_l_joint(&[pow(1.0)], &[0.1], 1e-8).is_err());
    }

    #[test]
    fn repeated_weight_adds_arguments() {
        let joint = mgf_l_joint(&[pow(0.1), pow(0.1)], &[0.1, 0.2], 1e-12).unwrap();
        let single = mgf_l_joint(&[pow(0.1)], &[0.3], 1e-12).unwrap();
        assert!((joint - single).abs() < 1e-12 * single);
    }

    #[test]
    fn printed_form_differs() {
        let d = mgf_l_joint_eval(&[pow(0.0)], &[0.3], 1e-10, MgfFormula::Derived).unwrap();
        let p = mgf_l_joint_eval(&[pow(0.0)], &[0.3], 1e-10, MgfFormula::Printed).unwrap();
        assert!(p.value < 1.0 && d.value > 1.0);
    }

    #[test]
    fn monte_carlo_agreement() {
        let spec = LimitLawSpec::new(pow(0.0), 1e-6).unwrap();
        let draws = sample_limit_l(&spec, RngStream::new(99, 0), 200_000).unwrap();
        for t in [-0.3, 0.3] {
            let emp = draws.iter().map(|x| (t * x).exp()).sum::<f64>() / draws.len() as f64;
            let exact = mgf_l_joint(&[pow(0.0)], &[t], 1e-10).unwrap();
            assert!(((emp - exact) / exact).abs() < 0.02, "t={t}: {emp} vs {exact}");
        }
    }
}
