//! Bracketed scalar maximization.

use crate::error::{Error, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarOptimum {
    pub x: f64,
    pub value: f64,
    pub evaluations: usize,
}

/// Upper bound on objective evaluations used by [`golden_section_max`].
pub fn golden_section_budget(width: f64, tol: f64) -> usize {
    let ratio = (width / tol).max(1.0);
    (ratio.ln() / (1.0 / INV_PHI).ln()).ceil() as usize + 2
}

/// Golden-section search for the maximum of a unimodal `f` on `[lo, hi]`.
///
/// Stops once the bracket is narrower than `tol`; `f` is never evaluated
/// outside `[lo, hi]`. A result that ends up within `tol` of either end of
/// the interval is reported as [`Error::NotBracketed`], since the maximum is
/// then not known to be interior.
pub fn golden_section_max<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<ScalarOptimum>
where
    F: FnMut(f64) -> f64,
{
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::Domain(format!("invalid search interval [{lo}, {hi}]")));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }

    let (mut a, mut b) = (lo, hi);
    let mut c = b - (b - a) * INV_PHI;
    let mut d = a + (b - a) * INV_PHI;
    let mut fc = f(c);
    let mut fd = f(d);
    let mut evaluations = 2;

    while b - a > tol {
        if fc.is_nan() || fd.is_nan() {
            return Err(Error::Domain("objective returned NaN".into()));
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - (b - a) * INV_PHI;
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + (b - a) * INV_PHI;
            fd = f(d);
        }
        evaluations += 1;
    }

    let (x, value) = if fc > fd { (c, fc) } else { (d, fd) };
    if x - lo <= tol || hi - x <= tol {
        return Err(Error::NotBracketed { lo, hi });
    }
    Ok(ScalarOptimum { x, value, evaluations })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_parabola_peak() {
        let r = golden_section_max(|x| -(x - 0.3).powi(2), -1.0, 2.0, 1e-8).unwrap();
        assert!((r.x - 0.3).abs() < 1e-8);
        assert!(r.evaluations <= golden_section_budget(3.0, 1e-8));
    }

    #[test]
    fn boundary_maximum_is_not_bracketed() {
        let r = golden_section_max(|x| x, 0.0, 1.0, 1e-6);
        assert!(matches!(r, Err(Error::NotBracketed { .. })));
    }

    #[test]
    fn stays_inside_interval() {
        let mut seen = Vec::new();
        let _ = golden_section_max(
            |x| {
                seen.push(x);
                (-(x * x)).exp()
            },
            -0.5,
            0.7,
            1e-6,
        );
        assert!(seen.iter().all(|&x| (-0.5..=0.7).contains(&x)));
    }

    #[test]
    fn rejects_bad_interval() {
        assert!(golden_section_max(|x| x, 1.0, 0.0, 1e-3).is_err());
        assert!(golden_section_max(|x| x, 0.0, 1.0, 0.0).is_err());
    }
}
