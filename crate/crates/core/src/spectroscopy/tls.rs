use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::constants::{BOLTZMANN, HBAR};
use crate::error::{ensure_positive, Error, Result};
use crate::lsq::{minimize, Residuals};

/// Two-level-system loss model:
/// `1/Q_i = tan_delta * tanh(hbar w / 2kT) / (1 + n/n_c)^(beta/2) + 1/Q_other`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TlsParams {
    pub tan_delta: f64,
    pub n_c: f64,
    pub beta: f64,
    pub q_other: f64,
    pub temperature: f64,
}

impl TlsParams {
    pub fn validate(&self) -> Result<()> {
        ensure_positive("tan_delta", self.tan_delta)?;
        ensure_positive("n_c", self.n_c)?;
        ensure_positive("q_other", self.q_other)?;
        ensure_positive("temperature", self.temperature)?;
        if !(self.beta > 0.0 && self.beta <= 2.0) {
            return Err(Error::Domain(format!("beta must lie in (0, 2], got {}", self.beta)));
        }
        Ok(())
    }

    fn thermal_factor(&self, f_r: f64) -> f64 {
        (HBAR * TAU * f_r / (2.0 * BOLTZMANN * self.temperature)).tanh()
    }
}

/// Internal quality factor at each mean photon number in `n_bar`.
pub fn qi_vs_photon_number(params: &TlsParams, f_r: f64, n_bar: &[f64]) -> Result<Vec<f64>> {
    params.validate()?;
    ensure_positive("f_r", f_r)?;
    let th = params.thermal_factor(f_r);
    n_bar
        .iter()
        .map(|&n| {
            if !(n >= 0.0) {
                return Err(Error::Domain(format!("photon number must be non-negative, got {n}")));
            }
            let tls = params.tan_delta * th / (1.0 + n / params.n_c).powf(0.5 * params.beta);
            Ok(1.0 / (tls + 1.0 / params.q_other))
        })
        .collect()
}

/// Residuals `ln Q_model - ln Q_data` over
/// `[ln tan_delta, ln n_c, ln Q_other, (b)]` with `beta = 2 / (1 + e^-b)`.
struct TlsResiduals<'a> {
    n_bar: &'a [f64],
    ln_q: &'a [f64],
    thermal: f64,
    fixed_beta: Option<f64>,
}

impl TlsResiduals<'_> {
    fn beta(&self, p: &[f64]) -> f64 {
        self.fixed_beta.unwrap_or_else(|| 2.0 / (1.0 + (-p[3]).exp()))
    }
}

impl Residuals for TlsResiduals<'_> {
    fn n_residuals(&self) -> usize {
        self.n_bar.len()
    }

    fn eval(&self, p: &[f64], r: &mut [f64], mut jac: Option<&mut [f64]>) {
        let np = p.len();
        let (a, n_c, q_o) = (p[0].exp(), p[1].exp(), p[2].exp());
        let beta = self.beta(p);
        for (k, (&n, &lq)) in self.n_bar.iter().zip(self.ln_q).enumerate() {
            let u = 1.0 + n / n_c;
            let sat = u.powf(-0.5 * beta);
            let tls = a * self.thermal * sat;
            let inv_q = tls + 1.0 / q_o;
            r[k] = -inv_q.ln() - lq;
            if let Some(j) = jac.as_deref_mut() {
                let row = &mut j[k * np..(k + 1) * np];
                row[0] = -tls / inv_q;
                row[1] = -(tls * 0.5 * beta * (n / n_c) / u) / inv_q;
                row[2] = (1.0 / q_o) / inv_q;
                if self.fixed_beta.is_none() {
                    let dbeta = beta * (1.0 - 0.5 * beta);
                    row[3] = (tls * 0.5 * u.ln() * dbeta) / inv_q;
                }
            }
        }
    }
}

/// Fit the TLS model to `(n_bar, q_i)` pairs at known `f_r` and
/// `temperature`. With `fit_beta` false the exponent stays at the initial
/// value (1 by default).
pub fn fit_tls(
    f_r: f64,
    temperature: f64,
    n_bar: &[f64],
    q_i: &[f64],
    fit_beta: bool,
    initial: Option<&TlsParams>,
) -> Result<TlsParams> {
    ensure_positive("f_r", f_r)?;
    ensure_positive("temperature", temperature)?;
    if n_bar.len() != q_i.len() {
        return Err(Error::DegenerateData("photon numbers and Q_i differ in length".into()));
    }
    let needed = if fit_beta { 4 } else { 3 };
    if n_bar.len() <= needed {
        return Err(Error::DegenerateData(format!(
            "need more than {needed} points for the TLS fit, got {}",
            n_bar.len()
        )));
    }
    if n_bar.iter().any(|&n| !(n >= 0.0)) || q_i.iter().any(|&q| !(q > 0.0)) {
        return Err(Error::Domain("photon numbers must be >= 0 and Q_i > 0".into()));
    }

    let q_max = q_i.iter().copied().fold(0.0, f64::max);
    let q_min = q_i.iter().copied().fold(f64::INFINITY, f64::min);
    let seed = match initial {
        Some(p) => {
            p.validate()?;
            *p
        }
        None => TlsParams {
            tan_delta: (1.0 / q_min - 1.0 / q_max).max(1e-3 / q_min),
            n_c: 1.0,
            beta: 1.0,
            q_other: q_max,
            temperature,
        },
    };
    let probe = TlsParams { temperature, ..seed };
    let ln_q: Vec<f64> = q_i.iter().map(|q| q.ln()).collect();
    let model = TlsResiduals {
        n_bar,
        ln_q: &ln_q,
        thermal: probe.thermal_factor(f_r),
        fixed_beta: (!fit_beta).then_some(seed.beta),
    };
    let mut p0 = vec![seed.tan_delta.ln(), seed.n_c.ln(), seed.q_other.ln()];
    if fit_beta {
        let b = seed.beta.clamp(0.02, 1.98) / 2.0;
        p0.push((b / (1.0 - b)).ln());
    }
    let out = minimize(&model, &p0, 200);
    if !out.converged || !out.params.iter().all(|v| v.is_finite()) {
        return Err(Error::FitFailed {
            best_residual: (out.ssr / n_bar.len() as f64).sqrt(),
        });
    }
    Ok(TlsParams {
        tan_delta: out.params[0].exp(),
        n_c: out.params[1].exp(),
        beta: model.beta(&out.params),
        q_other: out.params[2].exp(),
        temperature,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn example() -> TlsParams {
        TlsParams {
            tan_delta: 5.311e-5,
            n_c: 1.0,
            beta: 1.0,
            q_other: 80341.0,
            temperature: 0.02,
        }
    }

    #[test]
    fn low_and_high_power_limits() {
        let q = qi_vs_photon_number(&example(), 7.5e9, &[1.0, 1e6]).unwrap();
        assert_relative_eq!(q[0], 2e4, max_relative = 1e-3);
        assert_relative_eq!(q[1], 8e4, max_relative = 1e-3);
    }

    #[test]
    fn zero_photons_cold_limit() {
        let p = TlsParams {
            temperature: 1e-6,
            ..example()
        };
        let q = qi_vs_photon_number(&p, 7.5e9, &[0.0]).unwrap()[0];
        assert_relative_eq!(1.0 / q, p.tan_delta + 1.0 / p.q_other, max_relative = 1e-12);
    }

    #[test]
    fn monotone_in_photon_number() {
        let n: Vec<f64> = (0..40).map(|k| 10f64.powf(-2.0 + 0.25 * k as f64)).collect();
        let q = qi_vs_photon_number(&example(), 7.5e9, &n).unwrap();
        assert!(q.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn rejects_bad_params() {
        let p = TlsParams { beta: 2.5, ..example() };
        assert!(qi_vs_photon_number(&p, 7.5e9, &[1.0]).is_err());
        assert!(qi_vs_photon_number(&example(), 7.5e9, &[-1.0]).is_err());
    }

    #[test]
    fn fit_recovers_loss_tangent() {
        let truth = example();
        let n: Vec<f64> = (0..30).map(|k| 10f64.powf(-2.0 + 0.3 * k as f64)).collect();
        let q = qi_vs_photon_number(&truth, 7.5e9, &n).unwrap();
        let noisy: Vec<f64> = q
            .iter()
            .enumerate()
            .map(|(k, v)| v * (1.0 + 0.01 * ((k * 7 % 5) as f64 - 2.0) / 2.0))
            .collect();
        let fit = fit_tls(7.5e9, 0.02, &n, &noisy, false, None).unwrap();
        assert!((fit.tan_delta / truth.tan_delta - 1.0).abs() < 0.1);
        let fit = fit_tls(7.5e9, 0.02, &n, &q, true, None).unwrap();
        assert!((fit.tan_delta / truth.tan_delta - 1.0).abs() < 1e-4);
        assert!((fit.beta - 1.0).abs() < 1e-4);
    }
}
