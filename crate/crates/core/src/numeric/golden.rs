//! Golden-section search for the maximum of a unimodal function.

use crate::error::{Error, Result};
use crate::num::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GoldenResult<T> {
    pub argmax: T,
    pub value: T,
    /// Final bracket width.
    pub width: T,
    pub iterations: usize,
}

/// Maximises `f` on `[lo, hi]` until the bracket is narrower than `width`.
///
/// Every iteration checks the four tracked samples `a < c < d < b` for an
/// interior dip (a sample strictly below both neighbours), which a unimodal
/// function cannot produce. An optimum that collapses onto either end of the
/// starting bracket means the objective is monotone there and is reported as a
/// failure rather than returned.
pub fn golden_section_max<T, F>(f: F, lo: T, hi: T, width: T) -> Result<GoldenResult<T>>
where
    T: Real,
    F: Fn(T) -> Result<T>,
{
    if !(lo < hi) || !(width > T::zero()) {
        return Err(Error::InvalidInput(format!("bad golden-section bracket [{lo}, {hi}] / width {width}")));
    }
    let inv_phi = (T::lit(5.0).sqrt() - T::one()) / T::lit(2.0);
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a)?, f(b)?);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    let mut iterations = 0;
    while (b - a) > width {
        check_no_dip([fa, fc, fd, fb], [a, c, d, b])?;
        if fc >= fd {
            b = d;
            fb = fd;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            fa = fc;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
        iterations += 1;
        if iterations > 10_000 {
            return Err(Error::OptimizationFailed("golden-section search did not terminate".into()));
        }
    }
    check_no_dip([fa, fc, fd, fb], [a, c, d, b])?;
    let (argmax, value) = if fc >= fd { (c, fc) } else { (d, fd) };
    let edge = (width * T::lit(2.0)).max((hi - lo) * T::epsilon() * T::lit(8.0));
    if argmax - lo <= edge || hi - argmax <= edge {
        return Err(Error::OptimizationFailed(format!(
            "maximum at bracket edge ({argmax}); objective is monotone on [{lo}, {hi}]"
        )));
    }
    Ok(GoldenResult { argmax, value, width: b - a, iterations })
}

fn check_no_dip<T: Real>(values: [T; 4], points: [T; 4]) -> Result<()> {
    for i in 1..3 {
        if values[i] < values[i - 1] && values[i] < values[i + 1] {
            return Err(Error::OptimizationFailed(format!(
                "objective is not unimodal near {} (dip between neighbours)",
                points[i]
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_parabola_peak() {
        let r = golden_section_max(|x: f64| Ok(-(x - 2.3).powi(2)), 0.0, 5.0, 1e-8).unwrap();
        assert!((r.argmax - 2.3).abs() < 1e-8);
        assert!(r.width <= 1e-8);
    }

    #[test]
    fn monotone_objective_fails() {
        let r = golden_section_max(|x: f64| Ok(x), 0.0, 1.0, 1e-6);
        assert!(matches!(r, Err(Error::OptimizationFailed(_))));
    }

    #[test]
    fn bimodal_objective_is_detected() {
        // peaks at 0.3 and 4.0; the first interior sample lands in the valley
        let f = |x: f64| Ok((-4.0 * (x - 0.3).powi(2)).exp() + (-4.0 * (x - 4.0).powi(2)).exp());
        let r = golden_section_max(f, 0.0, 5.0, 1e-6);
        assert!(matches!(r, Err(Error::OptimizationFailed(_))), "{r:?}");
    }

    #[test]
    fn errors_from_objective_propagate() {
        let r = golden_section_max(|_: f64| Err(Error::NoSaddle("x".into())), 0.0, 1.0, 1e-3);
        assert!(matches!(r, Err(Error::NoSaddle(_))));
    }
}
