use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub center: Complex64,
    pub radius: f64,
}

impl Circle {
    /// RMS radial deviation of `points` from the circle, relative to the radius.
    pub fn relative_residual(&self, points: &[Complex64]) -> f64 {
        let ss: f64 = points
            .iter()
            .map(|p| ((p - self.center).norm() - self.radius).powi(2))
            .sum();
        (ss / points.len() as f64).sqrt() / self.radius
    }
}

/// Algebraic (Kasa) circle fit: minimizes `sum (x^2 + y^2 + D x + E y + F)^2`.
pub fn fit_circle(points: &[Complex64]) -> Result<Circle> {
    if points.len() < 3 {
        return Err(Error::DegenerateData("circle fit needs at least three points".into()));
    }
    let n = points.len() as f64;
    let mean = points.iter().sum::<Complex64>() / n;

    let mut m = Matrix3::<f64>::zeros();
    let mut rhs = Vector3::<f64>::zeros();
    for p in points {
        let q = p - mean;
        let row = Vector3::new(q.re, q.im, 1.0);
        let z = q.norm_sqr();
        m += row * row.transpose();
        rhs -= row * z;
    }
    let sol = m
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::DegenerateData("points are collinear or coincident".into()))?;
    let (d, e, f) = (sol[0], sol[1], sol[2]);
    let r2 = 0.25 * (d * d + e * e) - f;
    if !(r2 > 0.0) || !r2.is_finite() {
        return Err(Error::DegenerateData("circle fit produced no real radius".into()));
    }
    Ok(Circle {
        center: mean + Complex64::new(-0.5 * d, -0.5 * e),
        radius: r2.sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectroscopy::{frequency_grid, model_s11, ResonatorParams};
    use proptest::prelude::*;

    #[test]
    fn exact_circle() {
        let c = Complex64::new(0.3, -0.2);
        let pts: Vec<Complex64> = (0..12)
            .map(|k| c + Complex64::from_polar(0.7, k as f64 * 0.4))
            .collect();
        let fit = fit_circle(&pts).unwrap();
        assert!((fit.center - c).norm() < 1e-12);
        assert!((fit.radius - 0.7).abs() < 1e-12);
    }

    #[test]
    fn collinear_points_fail() {
        let pts: Vec<Complex64> = (0..5).map(|k| Complex64::new(k as f64, 2.0 * k as f64)).collect();
        assert!(fit_circle(&pts).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn s11_locus_is_a_circle(qi in 1e3f64..1e6, qc in 1e3f64..1e6, f_r in 4e9f64..9e9) {
            let p = ResonatorParams { f_r, q_i: qi, q_c: qc };
            let pts: Vec<Complex64> = frequency_grid(&p, 41, 10.0)
                .into_iter()
                .map(|f| model_s11(f, f_r, p.kappa_c(), p.kappa_i()).unwrap())
                .collect();
            let c = fit_circle(&pts).unwrap();
            prop_assert!(c.relative_residual(&pts) < 1e-9);
            prop_assert!((c.radius - p.kappa_c() / p.kappa()).abs() < 1e-9);
        }
    }
}
