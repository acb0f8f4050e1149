use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{ComplexTrace, DeembedParams, ResonatorParams};
use crate::error::{ensure_non_negative, ensure_positive, Error, Result};

/// Reflection coefficient at probe frequency `f` (Hz) for a resonance at
/// `f_r` with coupling / internal decay rates in rad/s.
pub fn model_s11(f: f64, f_r: f64, kappa_c: f64, kappa_i: f64) -> Result<Complex64> {
    ensure_positive("f_r", f_r)?;
    ensure_non_negative("kappa_c", kappa_c)?;
    ensure_non_negative("kappa_i", kappa_i)?;
    if !(kappa_c + kappa_i > 0.0) {
        return Err(Error::Domain("total linewidth must be positive".into()));
    }
    if !f.is_finite() {
        return Err(Error::Domain(format!("probe frequency must be finite, got {f}")));
    }
    Ok(s11_unchecked(f, f_r, kappa_c, kappa_i))
}

pub(crate) fn s11_unchecked(f: f64, f_r: f64, kappa_c: f64, kappa_i: f64) -> Complex64 {
    let dw = TAU * (f - f_r);
    let num = Complex64::new(kappa_i - kappa_c, 2.0 * dw);
    let den = Complex64::new(kappa_c + kappa_i, 2.0 * dw);
    num / den
}

/// `points` frequencies spanning `linewidths` full linewidths centred on
/// the resonance.
pub fn frequency_grid(params: &ResonatorParams, points: usize, linewidths: f64) -> Vec<f64> {
    let half = 0.5 * linewidths * params.linewidth();
    let n = points.max(2);
    (0..n)
        .map(|k| params.f_r - half + 2.0 * half * k as f64 / (n - 1) as f64)
        .collect()
}

/// Synthetic measured trace: background times the model plus complex
/// Gaussian noise of standard deviation `noise_sigma` per quadrature.
pub fn synthesize_trace(
    params: &ResonatorParams,
    background: &DeembedParams,
    frequencies: &[f64],
    noise_sigma: f64,
    seed: u64,
) -> Result<ComplexTrace> {
    ensure_positive("f_r", params.f_r)?;
    ensure_positive("q_i", params.q_i)?;
    ensure_positive("q_c", params.q_c)?;
    ensure_non_negative("noise_sigma", noise_sigma)?;
    background.validate()?;
    if frequencies.len() < 2 {
        return Err(Error::InvalidTrace("need at least two frequencies".into()));
    }

    let (kc, ki) = (params.kappa_c(), params.kappa_i());
    let f_center = 0.5 * (frequencies[0] + frequencies[frequencies.len() - 1]);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, noise_sigma).map_err(|e| Error::Domain(e.to_string()))?;

    let s11 = frequencies
        .iter()
        .map(|&f| {
            let clean = background.background(f, f_center) * s11_unchecked(f, params.f_r, kc, ki);
            if noise_sigma > 0.0 {
                clean + Complex64::new(noise.sample(&mut rng), noise.sample(&mut rng))
            } else {
                clean
            }
        })
        .collect();
    ComplexTrace::new(frequencies.to_vec(), s11, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn critical_coupling_null() {
        let s = model_s11(7.5e9, 7.5e9, 1e5, 1e5).unwrap();
        assert!(s.norm() < 1e-15);
    }

    #[test]
    fn far_off_resonance_reflects_fully() {
        let s = model_s11(7.5e9 + 1e12, 7.5e9, 1e5, 3e5).unwrap();
        assert!((s - Complex64::new(1.0, 0.0)).norm() < 1e-6);
        let s = model_s11(7.5e9 - 1e12, 7.5e9, 1e5, 3e5).unwrap();
        assert!((s - Complex64::new(1.0, 0.0)).norm() < 1e-6);
    }

    #[test]
    fn overcoupled_on_resonance() {
        // kc = 2 ki: magnitude 1/3, sign set by the unit-asymptote convention.
        let s = model_s11(7.5e9, 7.5e9, 2e5, 1e5).unwrap();
        assert_relative_eq!(s.re, -1.0 / 3.0, epsilon = 1e-15);
        assert_relative_eq!(s.norm(), 1.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn lossless_resonator_is_all_pass() {
        for k in -10..=10 {
            let s = model_s11(7.5e9 + k as f64 * 1e5, 7.5e9, 2e5, 0.0).unwrap();
            assert_relative_eq!(s.norm(), 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn rejects_bad_rates() {
        assert!(model_s11(1.0, 1.0, 0.0, 0.0).is_err());
        assert!(model_s11(1.0, 1.0, -1.0, 1.0).is_err());
    }

    #[test]
    fn noiseless_identity_synthesis_equals_model() {
        let p = ResonatorParams {
            f_r: 7.5e9,
            q_i: 2e4,
            q_c: 1e4,
        };
        let f = frequency_grid(&p, 101, 10.0);
        let t = synthesize_trace(&p, &DeembedParams::identity(), &f, 0.0, 1).unwrap();
        for (fk, sk) in t.frequencies().iter().zip(t.s11()) {
            assert_eq!(*sk, model_s11(*fk, p.f_r, p.kappa_c(), p.kappa_i()).unwrap());
        }
    }

    #[test]
    fn seeded_synthesis_is_deterministic() {
        let p = ResonatorParams {
            f_r: 7.5e9,
            q_i: 2e4,
            q_c: 1e4,
        };
        let f = frequency_grid(&p, 64, 10.0);
        let a = synthesize_trace(&p, &DeembedParams::identity(), &f, 0.01, 42).unwrap();
        let b = synthesize_trace(&p, &DeembedParams::identity(), &f, 0.01, 42).unwrap();
        let c = synthesize_trace(&p, &DeembedParams::identity(), &f, 0.01, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    proptest! {
        #[test]
        fn passive_reflection(kc in 1e3f64..1e8, ki in 1e3f64..1e8, df in -1e8f64..1e8) {
            let s = model_s11(7.5e9 + df, 7.5e9, kc, ki).unwrap();
            prop_assert!(s.norm() <= 1.0);
            prop_assert!(s.norm() < 1.0 - 1e-15 || df.abs() > 1e6 * (kc + ki));
        }
    }
}
