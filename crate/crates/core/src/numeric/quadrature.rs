//! Adaptive Simpson quadrature with an absolute tolerance.
//!
//! Proper-time differences are of order 1e-27 s, so the tolerance is absolute
//! rather than relative to the magnitude of the integrand. Oscillatory
//! integrands must be pre-split into `panels` no longer than a fraction of a
//! period; otherwise the coarse Simpson estimate can alias to a wrong answer
//! that happens to agree with its own halves.

use crate::error::{Error, Result};
use crate::num::Real;

/// Deepest bisection level before giving up.
pub const MAX_DEPTH: usize = 48;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature<T> {
    pub value: T,
    /// Sum of the per-interval Richardson error estimates.
    pub error_estimate: T,
    pub evaluations: usize,
}

struct Simpson<'a, T, F> {
    f: &'a F,
    evaluations: usize,
    error: T,
    _t: std::marker::PhantomData<T>,
}

impl<T: Real, F: Fn(T) -> T> Simpson<'_, T, F> {
    fn eval(&mut self, x: T) -> T {
        self.evaluations += 1;
        (self.f)(x)
    }

    #[allow(clippy::too_many_arguments)]
    fn recurse(&mut self, a: T, b: T, fa: T, fm: T, fb: T, whole: T, tol: T, depth: usize) -> Result<T> {
        let two = T::lit(2.0);
        let m = (a + b) / two;
        let lm = (a + m) / two;
        let rm = (m + b) / two;
        let flm = self.eval(lm);
        let frm = self.eval(rm);
        let left = (m - a) / T::lit(6.0) * (fa + T::lit(4.0) * flm + fm);
        let right = (b - m) / T::lit(6.0) * (fm + T::lit(4.0) * frm + fb);
        let delta = left + right - whole;
        let err = delta.abs() / T::lit(15.0);
        if err <= tol || (depth >= 2 && (m - a).abs() <= T::epsilon() * a.abs().max(b.abs())) {
            self.error = self.error + err;
            return Ok(left + right + delta / T::lit(15.0));
        }
        if depth >= MAX_DEPTH {
            return Err(Error::NumericalFailure(format!(
                "adaptive Simpson did not converge on [{a}, {b}] (error {err:e} > {tol:e})"
            )));
        }
        let l = self.recurse(a, m, fa, flm, fm, left, tol / two, depth + 1)?;
        let r = self.recurse(m, b, fm, frm, fb, right, tol / two, depth + 1)?;
        Ok(l + r)
    }
}

/// Integrates `f` over `[a, b]` to absolute tolerance `abs_tol`.
///
/// The interval is first cut into `panels` equal pieces; the tolerance is
/// shared equally between them.
pub fn adaptive_simpson<T: Real, F: Fn(T) -> T>(f: &F, a: T, b: T, abs_tol: T, panels: usize) -> Result<Quadrature<T>> {
    if !(abs_tol > T::zero()) {
        return Err(Error::InvalidInput("quadrature tolerance must be positive".into()));
    }
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidInput("quadrature bounds must be finite".into()));
    }
    if a == b {
        return Ok(Quadrature { value: T::zero(), error_estimate: T::zero(), evaluations: 0 });
    }
    let panels = panels.max(1);
    let n = T::from_count(panels);
    let width = (b - a) / n;
    let tol = abs_tol / n;
    let mut s = Simpson { f, evaluations: 0, error: T::zero(), _t: std::marker::PhantomData };
    let mut total = T::zero();
    let mut x0 = a;
    let mut f0 = s.eval(x0);
    for i in 0..panels {
        let x1 = if i + 1 == panels { b } else { a + width * T::from_count(i + 1) };
        let xm = (x0 + x1) / T::lit(2.0);
        let fm = s.eval(xm);
        let f1 = s.eval(x1);
        let whole = (x1 - x0) / T::lit(6.0) * (f0 + T::lit(4.0) * fm + f1);
        total = total + s.recurse(x0, x1, f0, fm, f1, whole, tol, 0)?;
        x0 = x1;
        f0 = f1;
    }
    if !total.is_finite() {
        return Err(Error::NumericalFailure("integrand produced a non-finite value".into()));
    }
    Ok(Quadrature { value: total, error_estimate: s.error, evaluations: s.evaluations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_is_exact() {
        let q = adaptive_simpson(&|x: f64| 3.0 * x * x * x - x + 2.0, -1.0, 2.0, 1e-12, 1).unwrap();
        // ∫ = 3/4 (16 - 1) - (4 - 1)/2 + 2·3
        assert!((q.value - (11.25 - 1.5 + 6.0)).abs() < 1e-12);
    }

    #[test]
    fn tiny_integrand_meets_absolute_tolerance() {
        let scale = 1.6e-27;
        let q = adaptive_simpson(&|t: f64| scale * (PI * t).sin().powi(2), 0.0, 1.0, 1e-33, 1).unwrap();
        assert!((q.value - scale / 2.0).abs() < 1e-33, "{:e}", q.value - scale / 2.0);
    }

    #[test]
    fn oscillatory_integrand_needs_panels() {
        let w = 2.0 * PI * 1000.0;
        let f = |t: f64| (w * t).cos().powi(2);
        // samples at 0, 1/2, 1 all hit cos² = 1: the unsplit estimate aliases
        let aliased = adaptive_simpson(&f, 0.0, 1.0, 1e-9, 1).unwrap();
        assert!((aliased.value - 1.0).abs() < 1e-9);
        let good = adaptive_simpson(&f, 0.0, 1.0, 1e-9, 8000).unwrap();
        assert!((good.value - 0.5).abs() < 1e-9);
    }

    #[test]
    fn reversed_bounds_negate() {
        let f = |x: f64| x.exp();
        let a = adaptive_simpson(&f, 0.0, 1.0, 1e-12, 2).unwrap().value;
        let b = adaptive_simpson(&f, 1.0, 0.0, 1e-12, 2).unwrap().value;
        assert!((a + b).abs() < 1e-12);
        assert!((a - (1f64.exp() - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn bad_tolerance_is_rejected() {
        assert!(adaptive_simpson(&|x: f64| x, 0.0, 1.0, 0.0, 1).is_err());
    }

    #[test]
    fn non_convergence_is_reported() {
        let f = |x: f64| if x > 0.3 { f64::MAX / 1e10 } else { 0.0 };
        let r = adaptive_simpson(&f, 0.0, 1.0, 1e-300, 1);
        assert!(matches!(r, Err(Error::NumericalFailure(_))));
    }
}
