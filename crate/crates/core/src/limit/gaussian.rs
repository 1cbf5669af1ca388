//! Finite-dimensional Gaussian limits with covariance `Γ_n(f_a, f_b)`.

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::evt::{gamma_numeric, WeightFunction};
use crate::scalar::Real;
use crate::tail::RngStream;

/// Pivot tolerance of the factorization.
pub const PIVOT_TOL: f64 = 1e-12;

/// Lower factor `L` (`dim × rank`, rows in the original order) with `L Lᵀ = A`.
#[derive(Debug, Clone, PartialEq)]
pub struct PivotedCholesky<T> {
    factor: Vec<Vec<T>>,
    rank: usize,
}

impl<T: Real> PivotedCholesky<T> {
    /// Factors a symmetric positive semidefinite matrix, stopping once every
    /// remaining pivot is below `tol`.
    pub fn new(a: &[Vec<T>], tol: T) -> Result<Self> {
        let n = a.len();
        if n == 0 {
            return domain("empty matrix");
        }
        if a.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidInput("matrix is not square".into()));
        }
        for i in 0..n {
            for j in 0..i {
                if !a[i][j].is_finite() || (a[i][j] - a[j][i]).abs() > tol {
                    return Err(Error::Numeric(format!("matrix is not symmetric at ({i}, {j})")));
                }
            }
        }
        let mut perm: Vec<usize> = (0..n).collect();
        let mut diag: Vec<T> = (0..n).map(|i| a[i][i]).collect();
        let mut l = vec![vec![T::zero(); n]; n];
        let mut rank = n;
        for i in 0..n {
            let p = (i..n)
                .max_by(|&x, &y| diag[perm[x]].partial_cmp(&diag[perm[y]]).unwrap_or(std::cmp::Ordering::Equal))
                .expect("nonempty range");
            perm.swap(i, p);
            let piv = diag[perm[i]];
            if piv <= tol {
                if let Some(&q) = perm[i..].iter().find(|&&q| diag[q] < -tol) {
                    return Err(Error::Numeric(format!(
                        "matrix is not positive semidefinite: residual pivot {} at row {q}",
                        diag[q]
                    )));
                }
                rank = i;
                break;
            }
            let root = piv.sqrt();
            let pi = perm[i];
            l[pi][i] = root;
            for &r in &perm[i + 1..] {
                let mut s = a[r][pi];
                for c in 0..i {
                    s -= l[r][c] * l[pi][c];
                }
                let v = s / root;
                l[r][i] = v;
                diag[r] -= v * v;
            }
        }
        for row in &mut l {
            row.truncate(rank);
        }
        Ok(Self { factor: l, rank })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.factor.len()
    }

    pub fn factor(&self) -> &[Vec<T>] {
        &self.factor
    }

    /// `L z` for `z` of length `rank`.
    pub fn apply(&self, z: &[T]) -> Vec<T> {
        self.factor
            .iter()
            .map(|row| row.iter().zip(z).fold(T::zero(), |a, (&x, &y)| a + x * y))
            .collect()
    }
}

/// `[Γ_n(f_a, f_b)]` over the list.
pub fn gamma_matrix<T: Real>(f_list: &[WeightFunction<T>], k: usize) -> Result<Vec<Vec<T>>> {
    let s = f_list.len();
    let mut m = vec![vec![T::one(); s]; s];
    for a in 0..s {
        for b in 0..a {
            let g = gamma_numeric(&f_list[a], &f_list[b], k)?;
            m[a][b] = g;
            m[b][a] = g;
        }
        if s == 1 {
            gamma_numeric(&f_list[0], &f_list[0], k)?;
        }
    }
    Ok(m)
}

/// `count` draws of the centred Gaussian vector with covariance
/// `[Γ_n(f_a, f_b)]`; draw `i` uses `rng.child(i)`.
pub fn gaussian_fidi_sample<T: Real>(
    f_list: &[WeightFunction<T>],
    k: usize,
    rng: RngStream,
    count: usize,
) -> Result<Vec<Vec<T>>> {
    if f_list.is_empty() {
        return domain("need at least one weight");
    }
    if count == 0 {
        return domain("draw count must be at least 1");
    }
    let chol = PivotedCholesky::new(&gamma_matrix(f_list, k)?, T::lit(PIVOT_TOL))?;
    Ok((0..count as u64)
        .into_par_iter()
        .map(|i| {
            let mut gen = rng.child(i).generator();
            let z: Vec<T> = (0..chol.rank())
                .map(|_| T::lit(StandardNormal.sample(&mut gen)))
                .collect();
            chol.apply(&z)
        })
        .collect())
}
