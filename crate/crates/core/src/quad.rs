//! Adaptive Simpson quadrature.

use crate::error::{Error, Result};
use crate::scalar::Real;

const MAX_DEPTH: u32 = 48;

/// `∫_a^b g(x) dx` to relative tolerance `rel_tol` (absolute floor `abs_floor`).
pub fn integrate<T: Real, F: Fn(T) -> T>(g: F, a: T, b: T, rel_tol: T, abs_floor: T) -> Result<T> {
    if a == b {
        return Ok(T::zero());
    }
    let two = T::lit(2.0);
    let m = (a + b) / two;
    let (fa, fm, fb) = (g(a), g(m), g(b));
    let whole = simpson(a, b, fa, fm, fb);
    // A coarse composite estimate sets the absolute target.
    let coarse: T = {
        let n = 64;
        let h = (b - a) / T::from_index(n);
        (0..n)
            .map(|i| {
                let x0 = a + h * T::from_index(i);
                let x1 = x0 + h;
                simpson(x0, x1, g(x0), g((x0 + x1) / two), g(x1))
            })
            .sum()
    };
    let tol = (rel_tol * coarse.abs()).max(abs_floor);
    let v = recurse(&g, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)?;
    if !v.is_finite() {
        return Err(Error::Numeric("quadrature produced a non-finite value".into()));
    }
    Ok(v)
}

fn simpson<T: Real>(a: T, b: T, fa: T, fm: T, fb: T) -> T {
    (b - a) / T::lit(6.0) * (fa + T::lit(4.0) * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn recurse<T: Real, F: Fn(T) -> T>(
    g: &F,
    a: T,
    b: T,
    fa: T,
    fm: T,
    fb: T,
    whole: T,
    tol: T,
    depth: u32,
) -> Result<T> {
    let two = T::lit(2.0);
    let m = (a + b) / two;
    let lm = (a + m) / two;
    let rm = (m + b) / two;
    let (flm, frm) = (g(lm), g(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if delta.abs() <= T::lit(15.0) * tol || (b - a).abs() <= T::epsilon() * m.abs() {
        return Ok(left + right + delta / T::lit(15.0));
    }
    if depth == 0 {
        return Err(Error::Numeric("adaptive quadrature did not converge".into()));
    }
    let half = tol / two;
    Ok(recurse(g, a, m, fa, flm, fm, left, half, depth - 1)?
        + recurse(g, m, b, fm, frm, fb, right, half, depth - 1)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smooth_integrals() {
        let v = integrate(|x: f64| x.exp(), 0.0, 1.0, 1e-12, 0.0).unwrap();
        assert!((v - (1f64.exp() - 1.0)).abs() < 1e-12);
        let v = integrate(|x: f64| (-x).exp(), -700.0, 0.0, 1e-10, 0.0).unwrap();
        assert!((v - ((700f64).exp() - 1.0)).abs() < 1e-9 * v);
    }
}
