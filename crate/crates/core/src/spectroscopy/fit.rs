use std::f64::consts::TAU;

use num_complex::Complex64;

use super::circle::fit_circle;
use super::model::s11_unchecked;
use super::{ComplexTrace, ParamErrors, ResonanceFit, ResonatorParams};
use crate::error::{Error, Result};
use crate::lsq::{covariance, minimize, Residuals};

const Q_MIN: f64 = 1.0;
const Q_MAX: f64 = 1e9;
const MAX_ITERATIONS: usize = 200;

/// Optional background parameters carried alongside the resonance in a
/// joint fit.
#[derive(Debug, Clone, Copy)]
pub(super) struct BackgroundTerms {
    pub f_center: f64,
    pub delay0: f64,
    pub delay_scale: f64,
    pub span: f64,
    pub with_slope: bool,
}

/// Residuals of `B(f) S11(f) - data` with parameters
/// `[x, ln Qi, ln Qc, (ln a, phi_c, y, (z))]`, where
/// `f_r = f0 + x * f_scale`, `tau = delay0 + y * delay_scale` and the
/// amplitude slope is `z / span`.
pub(super) struct S11Residuals<'a> {
    pub freqs: &'a [f64],
    pub data: &'a [Complex64],
    pub f0: f64,
    pub f_scale: f64,
    pub background: Option<BackgroundTerms>,
}

impl S11Residuals<'_> {
    pub fn n_params(&self) -> usize {
        match self.background {
            None => 3,
            Some(b) if b.with_slope => 7,
            Some(_) => 6,
        }
    }
}

impl Residuals for S11Residuals<'_> {
    fn n_residuals(&self) -> usize {
        2 * self.freqs.len()
    }

    fn eval(&self, p: &[f64], r: &mut [f64], mut jac: Option<&mut [f64]>) {
        let np = self.n_params();
        let f_r = self.f0 + p[0] * self.f_scale;
        let (q_i, q_c) = (p[1].exp(), p[2].exp());
        let (ki, kc) = (TAU * f_r / q_i, TAU * f_r / q_c);
        let kappa = ki + kc;

        for (k, (&f, &d)) in self.freqs.iter().zip(self.data).enumerate() {
            let s = s11_unchecked(f, f_r, kc, ki);
            let (bg, u) = match self.background {
                None => (Complex64::new(1.0, 0.0), 0.0),
                Some(b) => {
                    let u = f - b.f_center;
                    let tau = b.delay0 + p[5] * b.delay_scale;
                    let slope = if b.with_slope { p[6] / b.span } else { 0.0 };
                    let amp = p[3].exp() * (1.0 + slope * u);
                    (Complex64::from_polar(amp, p[4] + TAU * tau * u), u)
                }
            };
            let m = bg * s;
            let res = m - d;
            r[2 * k] = res.re;
            r[2 * k + 1] = res.im;

            if let Some(j) = jac.as_deref_mut() {
                let den = Complex64::new(kappa, 2.0 * TAU * (f - f_r));
                let den2 = den * den;
                let ds_dkc = -2.0 / den + 2.0 * kc / den2;
                let ds_dki = 2.0 * kc / den2;
                let ds_ddelta = Complex64::new(0.0, 4.0 * kc) / den2;
                let ds_dx = ds_ddelta * (-TAU * self.f_scale) + (ds_dkc * kc + ds_dki * ki) * (self.f_scale / f_r);
                let mut grads = [Complex64::default(); 7];
                grads[0] = bg * ds_dx;
                grads[1] = bg * (-ki * ds_dki);
                grads[2] = bg * (-kc * ds_dkc);
                if let Some(b) = self.background {
                    grads[3] = m;
                    grads[4] = Complex64::i() * m;
                    grads[5] = Complex64::i() * (TAU * b.delay_scale * u) * m;
                    if b.with_slope {
                        let phase =
                            Complex64::from_polar(p[3].exp(), p[4] + TAU * (b.delay0 + p[5] * b.delay_scale) * u);
                        grads[6] = phase * s * (u / b.span);
                    }
                }
                for (c, g) in grads[..np].iter().enumerate() {
                    j[2 * k * np + c] = g.re;
                    j[(2 * k + 1) * np + c] = g.im;
                }
            }
        }
    }
}

/// Rough resonance parameters from a de-embedded locus.
///
/// The circle radius gives `kc / k`; the steepest point of the trace gives
/// `f_r` and, through `|dS/df|_max = 8 pi r / k`, the total linewidth.
pub fn seed_from_locus(trace: &ComplexTrace) -> Result<ResonatorParams> {
    let f = trace.frequencies();
    let s = trace.s11();
    let n = f.len();
    let circle = fit_circle(s)?;
    let ratio = circle.radius.clamp(1e-6, 1.0 - 1e-6);

    // A few points of lever arm suppress noise in the derivative estimate.
    let h = if n >= 64 { 3 } else { 1 };
    let mut best = (0.0, f[n / 2]);
    for k in h..n - h {
        let slope = (s[k + h] - s[k - h]).norm() / (f[k + h] - f[k - h]);
        if slope > best.0 {
            best = (slope, f[k]);
        }
    }
    let (max_slope, f_r) = best;
    if !(max_slope > 0.0) {
        return Err(Error::DegenerateData("trace shows no resonance".into()));
    }
    let kappa = 4.0 * TAU * ratio / max_slope;
    let kappa_c = ratio * kappa;
    let kappa_i = (kappa - kappa_c).max(0.01 * kappa);
    Ok(ResonatorParams {
        f_r,
        q_i: (TAU * f_r / kappa_i).clamp(Q_MIN, Q_MAX),
        q_c: (TAU * f_r / kappa_c).clamp(Q_MIN, Q_MAX),
    })
}

/// Complex least-squares fit of the reflection model to a de-embedded trace.
///
/// Without an initial guess the fit is seeded from the trace locus.
pub fn fit_resonance(trace: &ComplexTrace, initial: Option<&ResonatorParams>) -> Result<ResonanceFit> {
    let seed = match initial {
        Some(p) => {
            if !(p.f_r > 0.0 && p.q_i > 0.0 && p.q_c > 0.0) {
                return Err(Error::Domain("initial guess must be positive".into()));
            }
            *p
        }
        None => seed_from_locus(trace)?,
    };
    let f_scale = seed.linewidth();
    let model = S11Residuals {
        freqs: trace.frequencies(),
        data: trace.s11(),
        f0: seed.f_r,
        f_scale,
        background: None,
    };
    let out = minimize(&model, &[0.0, seed.q_i.ln(), seed.q_c.ln()], MAX_ITERATIONS);
    let residual_rms = (out.ssr / trace.len() as f64).sqrt();
    if !out.converged || !out.params.iter().all(|v| v.is_finite()) {
        return Err(Error::FitFailed {
            best_residual: residual_rms,
        });
    }
    let f_r = seed.f_r + out.params[0] * f_scale;
    let (q_i, q_c) = (out.params[1].exp(), out.params[2].exp());
    for (name, q) in [("Q_i", q_i), ("Q_c", q_c)] {
        if !(Q_MIN..=Q_MAX).contains(&q) {
            return Err(Error::RejectedFit(format!(
                "{name} = {q:.3e} outside [{Q_MIN}, {Q_MAX:e}]"
            )));
        }
    }
    if f_r < trace.frequencies()[0] || f_r > trace.frequencies()[trace.len() - 1] {
        return Err(Error::RejectedFit(format!("f_r = {f_r:.6e} Hz lies outside the trace")));
    }

    let uncertainties = match covariance(&out) {
        Some(c) => ParamErrors {
            f_r: f_scale * c[(0, 0)].max(0.0).sqrt(),
            q_i: q_i * c[(1, 1)].max(0.0).sqrt(),
            q_c: q_c * c[(2, 2)].max(0.0).sqrt(),
        },
        None => ParamErrors {
            f_r: f64::NAN,
            q_i: f64::NAN,
            q_c: f64::NAN,
        },
    };
    Ok(ResonanceFit {
        f_r,
        q_i,
        q_c,
        residual_rms,
        uncertainties,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectroscopy::{frequency_grid, synthesize_trace, DeembedParams};

    fn numeric_jacobian(model: &S11Residuals, p: &[f64]) -> Vec<f64> {
        let m = model.n_residuals();
        let n = p.len();
        let mut out = vec![0.0; m * n];
        for c in 0..n {
            let h = 1e-6 * p[c].abs().max(1e-3);
            let mut pp = p.to_vec();
            let mut pm = p.to_vec();
            pp[c] += h;
            pm[c] -= h;
            let mut rp = vec![0.0; m];
            let mut rm = vec![0.0; m];
            model.eval(&pp, &mut rp, None);
            model.eval(&pm, &mut rm, None);
            for k in 0..m {
                out[k * n + c] = (rp[k] - rm[k]) / (2.0 * h);
            }
        }
        out
    }

    #[test]
    fn analytic_jacobian_matches_finite_differences() {
        let p = ResonatorParams {
            f_r: 7.5e9,
            q_i: 2e4,
            q_c: 1e4,
        };
        let freqs = frequency_grid(&p, 33, 8.0);
        let data = vec![Complex64::default(); freqs.len()];
        for background in [
            None,
            Some(BackgroundTerms {
                f_center: 7.5e9,
                delay0: 40e-9,
                delay_scale: 1e-7,
                span: 3e6,
                with_slope: true,
            }),
        ] {
            let model = S11Residuals {
                freqs: &freqs,
                data: &data,
                f0: 7.5e9,
                f_scale: 1e5,
                background,
            };
            let params = [0.3, 2e4f64.ln(), 1.1e4f64.ln(), 0.2, 0.7, 0.1, 0.05];
            let params = &params[..model.n_params()];
            let mut r = vec![0.0; model.n_residuals()];
            let mut j = vec![0.0; model.n_residuals() * params.len()];
            model.eval(params, &mut r, Some(&mut j));
            let num = numeric_jacobian(&model, params);
            for (a, b) in j.iter().zip(&num) {
                assert!((a - b).abs() < 1e-5 * (1.0 + b.abs()), "{a} vs {b}");
            }
        }
    }

    #[test]
    fn noiseless_fit_is_exact() {
        let p = ResonatorParams {
            f_r: 7.5e9,
            q_i: 2e4,
            q_c: 1e4,
        };
        let f = frequency_grid(&p, 401, 10.0);
        let t = synthesize_trace(&p, &DeembedParams::identity(), &f, 0.0, 0).unwrap();
        let fit = fit_resonance(&t, None).unwrap();
        assert!((fit.f_r - p.f_r).abs() / p.f_r < 1e-9);
        assert!((fit.q_i - p.q_i).abs() / p.q_i < 1e-6);
        assert!((fit.q_c - p.q_c).abs() / p.q_c < 1e-6);
        assert!(fit.residual_rms < 1e-9);
    }

    #[test]
    fn seed_is_close() {
        let p = ResonatorParams {
            f_r: 6.1e9,
            q_i: 5e4,
            q_c: 2e4,
        };
        let f = frequency_grid(&p, 401, 10.0);
        let t = synthesize_trace(&p, &DeembedParams::identity(), &f, 0.0, 0).unwrap();
        let s = seed_from_locus(&t).unwrap();
        assert!((s.f_r - p.f_r).abs() < 0.05 * p.linewidth());
        assert!((s.q_c / p.q_c - 1.0).abs() < 0.1);
        assert!((s.q_i / p.q_i - 1.0).abs() < 0.2);
    }

    #[test]
    fn flat_trace_has_no_resonance() {
        let f: Vec<f64> = (0..50).map(|k| 7.5e9 + 1e3 * k as f64).collect();
        let t = ComplexTrace::new(f, vec![Complex64::new(1.0, 0.0); 50], None).unwrap();
        assert!(fit_resonance(&t, None).is_err());
    }
}
