//! Single-port reflection spectroscopy.
//!
//! Reflection convention: `S11 = 1 - 2 kc / (k + 2i dw)` with
//! `dw = 2 pi (f - f_r)`, i.e. unit reflection far from resonance and
//! `(ki - kc) / (ki + kc)` on resonance. The measured trace is
//! `background(f) * S11(f)` where the background carries the cable
//! attenuation, phase offset and electrical delay.

mod circle;
mod deembed;
mod fit;
mod model;
mod tls;

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constants::PLANCK;
use crate::error::{ensure_non_negative, ensure_positive, Error, Result};

pub use circle::{fit_circle, Circle};
pub use deembed::{deembed, deembed_with, DeembedOptions};
pub use fit::{fit_resonance, seed_from_locus};
pub use model::{frequency_grid, model_s11, synthesize_trace};
pub use tls::{fit_tls, qi_vs_photon_number, TlsParams};

/// Fewest points accepted in a trace.
pub const MIN_TRACE_POINTS: usize = 16;

/// Frequency-indexed complex reflection data.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexTrace {
    frequencies: Vec<f64>,
    s11: Vec<Complex64>,
    power_at_sample: Option<f64>,
}

impl ComplexTrace {
    pub fn new(frequencies: Vec<f64>, s11: Vec<Complex64>, power_at_sample: Option<f64>) -> Result<Self> {
        if frequencies.len() != s11.len() {
            return Err(Error::InvalidTrace(format!(
                "{} frequencies but {} S11 values",
                frequencies.len(),
                s11.len()
            )));
        }
        if frequencies.len() < MIN_TRACE_POINTS {
            return Err(Error::InvalidTrace(format!(
                "need at least {MIN_TRACE_POINTS} points, got {}",
                frequencies.len()
            )));
        }
        if let Some(k) = frequencies.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidTrace(format!(
                "frequencies must be strictly increasing (index {})",
                k + 1
            )));
        }
        if frequencies.iter().any(|f| !f.is_finite()) || s11.iter().any(|z| !z.is_finite()) {
            return Err(Error::InvalidTrace("non-finite value in trace".into()));
        }
        Ok(Self {
            frequencies,
            s11,
            power_at_sample,
        })
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn s11(&self) -> &[Complex64] {
        &self.s11
    }

    /// Drive power at the sample plane (dBm), when known.
    pub fn power_at_sample(&self) -> Option<f64> {
        self.power_at_sample
    }

    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }

    /// Midpoint of the frequency span, the reference for the background
    /// amplitude slope.
    pub fn center_frequency(&self) -> f64 {
        0.5 * (self.frequencies[0] + self.frequencies[self.len() - 1])
    }

    pub fn span(&self) -> f64 {
        self.frequencies[self.len() - 1] - self.frequencies[0]
    }
}

/// Resonance described by its frequency and quality factors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResonatorParams {
    pub f_r: f64,
    pub q_i: f64,
    pub q_c: f64,
}

impl ResonatorParams {
    pub fn kappa_c(&self) -> f64 {
        TAU * self.f_r / self.q_c
    }

    pub fn kappa_i(&self) -> f64 {
        TAU * self.f_r / self.q_i
    }

    pub fn kappa(&self) -> f64 {
        self.kappa_c() + self.kappa_i()
    }

    pub fn q_total(&self) -> f64 {
        1.0 / (1.0 / self.q_i + 1.0 / self.q_c)
    }

    /// Full linewidth `kappa / 2 pi` in Hz.
    pub fn linewidth(&self) -> f64 {
        self.f_r / self.q_total()
    }
}

/// Cable / setup background applied to the resonator response.
///
/// `background(f) = a (1 + s (f - f_c)) exp(i (phi0 + 2 pi tau f))`, with
/// `f_c` the trace's centre frequency and `s` the optional amplitude slope.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeembedParams {
    pub amplitude: f64,
    /// Phase offset (rad), wrapped to (-pi, pi].
    pub phase_offset: f64,
    /// Electrical delay (s).
    pub electrical_delay: f64,
    /// Relative amplitude slope (1/Hz).
    pub amplitude_slope: Option<f64>,
}

impl DeembedParams {
    pub fn identity() -> Self {
        Self {
            amplitude: 1.0,
            phase_offset: 0.0,
            electrical_delay: 0.0,
            amplitude_slope: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive("amplitude", self.amplitude)?;
        if !self.phase_offset.is_finite() || !self.electrical_delay.is_finite() {
            return Err(Error::Domain("phase offset and delay must be finite".into()));
        }
        Ok(())
    }

    pub fn background(&self, f: f64, f_center: f64) -> Complex64 {
        let amp = self.amplitude * (1.0 + self.amplitude_slope.unwrap_or(0.0) * (f - f_center));
        Complex64::from_polar(amp, self.phase_offset + TAU * self.electrical_delay * f)
    }
}

/// Standard errors of the fitted resonance parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamErrors {
    pub f_r: f64,
    pub q_i: f64,
    pub q_c: f64,
}

/// Result of a resonance fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResonanceFit {
    pub f_r: f64,
    pub q_i: f64,
    pub q_c: f64,
    /// RMS of the complex residual `|S_model - S_data|`.
    pub residual_rms: f64,
    pub uncertainties: ParamErrors,
}

impl ResonanceFit {
    pub fn params(&self) -> ResonatorParams {
        ResonatorParams {
            f_r: self.f_r,
            q_i: self.q_i,
            q_c: self.q_c,
        }
    }
}

/// Mean intra-resonator photon number for a drive power `p_in` (W) at
/// detuning `detuning` (rad/s) from the resonance.
pub fn photon_number_from_power(p_in: f64, f_r: f64, kappa_c: f64, kappa: f64, detuning: f64) -> Result<f64> {
    ensure_positive("p_in", p_in)?;
    ensure_positive("f_r", f_r)?;
    ensure_non_negative("kappa_c", kappa_c)?;
    ensure_positive("kappa", kappa)?;
    if kappa_c > kappa {
        return Err(Error::Domain("kappa_c cannot exceed kappa".into()));
    }
    let photon_flux = p_in / (PLANCK * f_r);
    let half = 0.5 * kappa;
    Ok(photon_flux * kappa_c / (half * half + detuning * detuning))
}

pub(crate) fn wrap_phase(phi: f64) -> f64 {
    let w = phi.rem_euclid(TAU);
    if w > std::f64::consts::PI {
        w - TAU
    } else {
        w
    }
}
