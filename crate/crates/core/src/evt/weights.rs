//! Positive weight functions `j ↦ f(j)` on the positive integers.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::{log_add_exp, Real};

/// How a tabulated weight continues past its last stored value.
#[derive(Debug, Clone, PartialEq)]
pub enum Extension<T> {
    /// No rule: the weight is only defined on the table.
    Undeclared,
    /// Repeat the last stored value.
    Constant,
    /// `f(j) = f(L) (j / L)^τ` for `j > L`.
    PowerTail(T),
}

#[derive(Debug, Clone, PartialEq)]
pub enum WeightFunction<T> {
    /// `f(j) = j^τ`.
    Power { tau: T },
    Tabulated {
        values: Vec<T>,
        extension: Extension<T>,
    },
    Scaled {
        factor: T,
        inner: Box<WeightFunction<T>>,
    },
    Sum(Box<WeightFunction<T>>, Box<WeightFunction<T>>),
}

/// `c · j^e`, one term of the asymptotic expansion of a weight.
pub type Monomial<T> = (T, T);

impl<T: Real> WeightFunction<T> {
    pub fn power(tau: T) -> Result<Self> {
        if !tau.is_finite() {
            return Err(Error::InvalidInput(format!("power exponent {tau} is not finite")));
        }
        Ok(Self::Power { tau })
    }

    pub fn tabulated(values: Vec<T>, extension: Extension<T>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidInput("tabulated weight needs at least one value".into()));
        }
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v > T::zero()))
        {
            return Err(Error::InvalidInput(format!(
                "tabulated weight value {v} at j={} is not a positive finite number",
                i + 1
            )));
        }
        if let Extension::PowerTail(tau) = &extension {
            if !tau.is_finite() {
                return Err(Error::InvalidInput("power-tail exponent is not finite".into()));
            }
        }
        Ok(Self::Tabulated { values, extension })
    }

    pub fn scaled(factor: T, inner: Self) -> Result<Self> {
        if !(factor.is_finite() && factor > T::zero()) {
            return Err(Error::InvalidInput(format!("scale factor {factor} must be positive")));
        }
        Ok(Self::Scaled {
            factor,
            inner: Box::new(inner),
        })
    }

    pub fn sum(a: Self, b: Self) -> Self {
        Self::Sum(Box::new(a), Box::new(b))
    }

    /// Largest index the weight can be evaluated at, `None` when unbounded.
    pub fn support(&self) -> Option<usize> {
        match self {
            Self::Power { .. } => None,
            Self::Tabulated { values, extension } => match extension {
                Extension::Undeclared => Some(values.len()),
                _ => None,
            },
            Self::Scaled { inner, .. } => inner.support(),
            Self::Sum(a, b) => match (a.support(), b.support()) {
                (Some(x), Some(y)) => Some(x.min(y)),
                (x, None) => x,
                (None, y) => y,
            },
        }
    }

    pub(crate) fn check_support(&self, k: usize) -> Result<()> {
        match self.support() {
            Some(max) if k > max => Err(Error::Unsupported(format!(
                "weight {self} is tabulated up to j={max} with no extension rule, k={k} requested"
            ))),
            _ => Ok(()),
        }
    }

    /// `f(j)` for `j >= 1` inside the support.
    pub fn value(&self, j: usize) -> T {
        debug_assert!(j >= 1);
        match self {
            Self::Power { tau } => {
                if *tau == T::zero() {
                    T::one()
                } else if *tau == T::one() {
                    T::from_index(j)
                } else {
                    T::from_index(j).powf(*tau)
                }
            }
            Self::Tabulated { values, extension } => {
                let len = values.len();
                if j <= len {
                    return values[j - 1];
                }
                let last = values[len - 1];
                match extension {
                    Extension::Constant => last,
                    Extension::PowerTail(tau) => {
                        last * (T::from_index(j) / T::from_index(len)).powf(*tau)
                    }
                    Extension::Undeclared => T::nan(),
                }
            }
            Self::Scaled { factor, inner } => *factor * inner.value(j),
            Self::Sum(a, b) => a.value(j) + b.value(j),
        }
    }

    pub fn try_value(&self, j: usize) -> Result<T> {
        if j == 0 {
            return Err(Error::Domain("weights are indexed from j=1".into()));
        }
        self.check_support(j)?;
        Ok(self.value(j))
    }

    /// `ln f(j)`, finite even where `f(j)` itself overflows.
    pub fn ln_value(&self, j: usize) -> T {
        match self {
            Self::Power { tau } => *tau * T::from_index(j).ln(),
            Self::Tabulated { values, extension } => {
                let len = values.len();
                if j <= len {
                    return values[j - 1].ln();
                }
                let last = values[len - 1].ln();
                match extension {
                    Extension::Constant => last,
                    Extension::PowerTail(tau) => {
                        last + *tau * (T::from_index(j).ln() - T::from_index(len).ln())
                    }
                    Extension::Undeclared => T::nan(),
                }
            }
            Self::Scaled { factor, inner } => factor.ln() + inner.ln_value(j),
            Self::Sum(a, b) => log_add_exp(a.ln_value(j), b.ln_value(j)),
        }
    }

    /// Exact representation `f(j) = Σ c_i j^{e_i}` valid for every `j > J0`.
    ///
    /// Returns `(J0, terms)`, or `None` for a table without an extension rule.
    pub fn tail_monomials(&self) -> Option<(usize, Vec<Monomial<T>>)> {
        match self {
            Self::Power { tau } => Some((0, vec![(T::one(), *tau)])),
            Self::Tabulated { values, extension } => {
                let len = values.len();
                let last = values[len - 1];
                match extension {
                    Extension::Undeclared => None,
                    Extension::Constant => Some((len, vec![(last, T::zero())])),
                    Extension::PowerTail(tau) => Some((
                        len,
                        vec![(last * T::from_index(len).powf(-*tau), *tau)],
                    )),
                }
            }
            Self::Scaled { factor, inner } => {
                let (j0, terms) = inner.tail_monomials()?;
                Some((j0, terms.into_iter().map(|(c, e)| (*factor * c, e)).collect()))
            }
            Self::Sum(a, b) => {
                let (ja, mut ta) = a.tail_monomials()?;
                let (jb, tb) = b.tail_monomials()?;
                ta.extend(tb);
                Some((ja.max(jb), merge_monomials(ta)))
            }
        }
    }

    /// The power exponent, for the pure power class.
    pub fn power_exponent(&self) -> Option<T> {
        match self {
            Self::Power { tau } => Some(*tau),
            _ => None,
        }
    }

    /// Parses one list entry: `pow:<τ>`.
    pub fn parse_power(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let rest = spec
            .strip_prefix("pow:")
            .ok_or_else(|| Error::Config(format!("unknown weight `{spec}`, expected pow:<tau>")))?;
        let tau: f64 = rest
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("bad exponent in weight `{spec}`")))?;
        Self::power(T::lit(tau)).map_err(|e| Error::Config(e.to_string()))
    }

    /// Reads a table: one positive value per line, `#` comments and blanks skipped.
    pub fn parse_table(text: &str, extension: Extension<T>) -> Result<Self> {
        let mut values = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let v: f64 = line.parse().map_err(|_| Error::Parse {
                line: i + 1,
                message: format!("`{line}` is not a number"),
            })?;
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Parse {
                    line: i + 1,
                    message: format!("weight value {v} must be positive"),
                });
            }
            values.push(T::lit(v));
        }
        Self::tabulated(values, extension)
    }
}

impl<T: Real> FromStr for WeightFunction<T> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse_power(s)
    }
}

impl<T: Real> fmt::Display for WeightFunction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Power { tau } => write!(f, "pow:{tau}"),
            Self::Tabulated { values, extension } => {
                write!(f, "tab[{}]", values.len())?;
                match extension {
                    Extension::Undeclared => Ok(()),
                    Extension::Constant => write!(f, "+const"),
                    Extension::PowerTail(tau) => write!(f, "+pow:{tau}"),
                }
            }
            Self::Scaled { factor, inner } => write!(f, "{factor}*{inner}"),
            Self::Sum(a, b) => write!(f, "({a}+{b})"),
        }
    }
}

/// Adds coefficients of equal exponents and drops zero terms.
pub(crate) fn merge_monomials<T: Real>(mut terms: Vec<Monomial<T>>) -> Vec<Monomial<T>> {
    terms.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal));
    let mut out: Vec<Monomial<T>> = Vec::with_capacity(terms.len());
    for (c, e) in terms {
        match out.last_mut() {
            Some(last) if last.1 == e => last.0 += c,
            _ => out.push((c, e)),
        }
    }
    out.retain(|(c, _)| *c != T::zero());
    out
}

/// Product of two monomial expansions.
pub(crate) fn multiply_monomials<T: Real>(a: &[Monomial<T>], b: &[Monomial<T>]) -> Vec<Monomial<T>> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for &(ca, ea) in a {
        for &(cb, eb) in b {
            out.push((ca * cb, ea + eb));
        }
    }
    merge_monomials(out)
}
