use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::erf;
use crate::constants::HBAR;
use crate::error::{ensure_non_negative, ensure_positive, Error, Result};
use crate::optimize::golden_section_max;

/// TWPA saturation onset (dBm).
pub const DEFAULT_SATURATION_DBM: f64 = -100.0;
/// Measurements shorter than this many resonator lifetimes are not in
/// steady state.
const STEADY_STATE_LIFETIMES: f64 = 10.0;
/// Relative tolerance on the optimal measurement time.
const TAU_TOLERANCE: f64 = 1e-3;
const MAX_T1_MULTIPLE: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DispersiveScenario {
    /// Single-spin coupling `g0 / 2 pi` (Hz).
    pub g0: f64,
    /// Coupling rate (rad/s).
    pub kappa_c: f64,
    /// Internal loss rate (rad/s).
    pub kappa_i: f64,
    pub eta: f64,
    /// Non-radiative spin relaxation rate (1/s).
    pub gamma_nr: f64,
    pub f_r: f64,
    /// Drive limited to `n_crit / n_crit_safety` photons.
    pub n_crit_safety: f64,
}

impl DispersiveScenario {
    /// 30 kHz coupling, critically coupled `Q = 10^4` resonator at 7.5 GHz,
    /// 30 % efficiency, lanthanide relaxation rate.
    pub fn reference() -> Self {
        let kappa = TAU * 7.5e9 / 1e4;
        Self {
            g0: 30e3,
            kappa_c: kappa / 2.0,
            kappa_i: kappa / 2.0,
            eta: 0.3,
            gamma_nr: 1.0,
            f_r: 7.5e9,
            n_crit_safety: 2.0,
        }
    }

    pub fn kappa(&self) -> f64 {
        self.kappa_c + self.kappa_i
    }

    /// `2 pi g0` in rad/s.
    pub fn g0_angular(&self) -> f64 {
        TAU * self.g0
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive("g0", self.g0)?;
        ensure_positive("kappa_c", self.kappa_c)?;
        ensure_non_negative("kappa_i", self.kappa_i)?;
        ensure_non_negative("gamma_nr", self.gamma_nr)?;
        ensure_positive("f_r", self.f_r)?;
        ensure_positive("n_crit_safety", self.n_crit_safety)?;
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(Error::Domain(format!("eta must lie in (0, 1], got {}", self.eta)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DispersivePair {
    /// Dispersive shift (rad/s).
    pub chi: f64,
    pub n_crit: f64,
    pub s11_g: Complex64,
    pub s11_e: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DispersiveSnr {
    pub snr: f64,
    pub n_bar: f64,
    /// Set when `tau_m < 10 / kappa`, outside the steady-state assumption.
    pub short_measurement: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fidelity {
    /// Total fidelity `P_e * F_r`.
    pub total: f64,
    /// Readout fidelity `erf(SNR / 2)`.
    pub readout: f64,
    /// Excited-state survival `exp(-tau_m / T1)`.
    pub p_e: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReadoutOptimum {
    pub delta_opt: f64,
    pub tau_m_opt: f64,
    pub fidelity: f64,
    pub readout_fidelity: f64,
    pub p_e: f64,
    pub n_bar: f64,
    pub t1_at_delta: f64,
    pub power_dbm: f64,
}

/// Outcome of the fidelity maximization at one detuning.
#[derive(Debug)]
pub struct ReadoutPoint {
    pub delta: f64,
    pub result: Result<ReadoutOptimum>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerCheck {
    pub power_dbm: f64,
    pub within_budget: bool,
}

/// Spin lifetime at spin-resonator detuning `delta` (rad/s):
/// `1/T1 = 4 (2 pi g0)^2 / kappa * (kappa/2)^2 / ((kappa/2)^2 + delta^2) + gamma`.
pub fn purcell_t1_detuned(s: &DispersiveScenario, delta: f64) -> Result<f64> {
    s.validate()?;
    if !delta.is_finite() {
        return Err(Error::Domain("detuning must be finite".into()));
    }
    let kappa = s.kappa();
    let half = 0.5 * kappa;
    let g = s.g0_angular();
    let rate = 4.0 * g * g / kappa * half * half / (half * half + delta * delta) + s.gamma_nr;
    Ok(1.0 / rate)
}

/// Dispersive shift, critical photon number and the reflection seen at the
/// bare resonator frequency for the spin in its ground and excited state:
/// `S11_g/e = (kc - ki +- 2i chi) / (kc + ki -+ 2i chi)`.
pub fn dispersive_pair(s: &DispersiveScenario, delta: f64) -> Result<DispersivePair> {
    s.validate()?;
    if delta == 0.0 {
        return Err(Error::ZeroDetuning);
    }
    if !delta.is_finite() {
        return Err(Error::Domain("detuning must be finite".into()));
    }
    let g2 = s.g0_angular().powi(2);
    let chi = g2 / delta;
    let n_crit = delta * delta / (4.0 * g2);
    let a = s.kappa_c - s.kappa_i;
    let kappa = s.kappa();
    let s11_g = Complex64::new(a, 2.0 * chi) / Complex64::new(kappa, -2.0 * chi);
    let s11_e = Complex64::new(a, -2.0 * chi) / Complex64::new(kappa, 2.0 * chi);
    Ok(DispersivePair {
        chi,
        n_crit,
        s11_g,
        s11_e,
    })
}

/// Homodyne SNR after `tau_m` with `n_bar` intra-resonator photons:
/// `sqrt(8 n tau eta kc / ((kappa/2)^2 + chi^2)) |chi|`. Without `n_bar`
/// the drive sits at `n_crit / n_crit_safety`.
pub fn dispersive_snr(s: &DispersiveScenario, delta: f64, tau_m: f64, n_bar: Option<f64>) -> Result<DispersiveSnr> {
    let pair = dispersive_pair(s, delta)?;
    ensure_positive("tau_m", tau_m)?;
    let n_bar = match n_bar {
        Some(n) => {
            ensure_non_negative("n_bar", n)?;
            n
        }
        None => pair.n_crit / s.n_crit_safety,
    };
    let half = 0.5 * s.kappa();
    let snr = (8.0 * n_bar * tau_m * s.eta * s.kappa_c / (half * half + pair.chi * pair.chi)).sqrt() * pair.chi.abs();
    Ok(DispersiveSnr {
        snr,
        n_bar,
        short_measurement: tau_m < STEADY_STATE_LIFETIMES / s.kappa(),
    })
}

/// `F = exp(-tau_m / T1(delta)) erf(SNR / 2)` at the default drive.
pub fn total_fidelity(s: &DispersiveScenario, delta: f64, tau_m: f64) -> Result<Fidelity> {
    let snr = dispersive_snr(s, delta, tau_m, None)?.snr;
    let t1 = purcell_t1_detuned(s, delta)?;
    let p_e = (-tau_m / t1).exp();
    let readout = erf(0.5 * snr);
    Ok(Fidelity {
        total: p_e * readout,
        readout,
        p_e,
    })
}

/// Emitted power `n_bar kappa hbar w_r` in dBm, compared against the
/// amplifier saturation level.
pub fn twpa_power_check(n_bar: f64, kappa: f64, f_r: f64, saturation_dbm: f64) -> Result<PowerCheck> {
    ensure_non_negative("n_bar", n_bar)?;
    ensure_positive("kappa", kappa)?;
    ensure_positive("f_r", f_r)?;
    let watts = n_bar * kappa * HBAR * TAU * f_r;
    let power_dbm = if watts == 0.0 {
        f64::NEG_INFINITY
    } else {
        10.0 * (watts / 1e-3).log10()
    };
    Ok(PowerCheck {
        power_dbm,
        within_budget: power_dbm < saturation_dbm,
    })
}

/// Log-spaced detunings from `2 pi * 2 MHz` to `2 pi * 200 MHz`.
pub fn default_delta_grid() -> Vec<f64> {
    let n = 21;
    (0..n)
        .map(|k| TAU * 2e6 * 10f64.powf(2.0 * k as f64 / (n - 1) as f64))
        .collect()
}

fn optimize_one(s: &DispersiveScenario, delta: f64) -> Result<ReadoutOptimum> {
    let t1 = purcell_t1_detuned(s, delta)?;
    let lo = (STEADY_STATE_LIFETIMES / s.kappa()).ln();
    let hi = (MAX_T1_MULTIPLE * t1).ln();
    if !(lo < hi) {
        return Err(Error::NotBracketed {
            lo: lo.exp(),
            hi: hi.exp(),
        });
    }
    let mut failure = None;
    let best = golden_section_max(
        |log_tau| match total_fidelity(s, delta, log_tau.exp()) {
            Ok(f) => f.total,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        },
        lo,
        hi,
        TAU_TOLERANCE,
    )
    .map_err(|e| match e {
        Error::NotBracketed { lo, hi } => Error::NotBracketed {
            lo: lo.exp(),
            hi: hi.exp(),
        },
        other => other,
    });
    if let Some(e) = failure {
        return Err(e);
    }
    let tau = best?.x.exp();
    let fid = total_fidelity(s, delta, tau)?;
    let n_bar = dispersive_snr(s, delta, tau, None)?.n_bar;
    let power = twpa_power_check(n_bar, s.kappa(), s.f_r, DEFAULT_SATURATION_DBM)?;
    Ok(ReadoutOptimum {
        delta_opt: delta,
        tau_m_opt: tau,
        fidelity: fid.total,
        readout_fidelity: fid.readout,
        p_e: fid.p_e,
        n_bar,
        t1_at_delta: t1,
        power_dbm: power.power_dbm,
    })
}

/// Maximize the total fidelity over `tau_m` at every detuning in
/// `delta_grid`, by golden-section search on `ln tau_m` over
/// `[10 / kappa, 100 T1(delta)]`. Failures are reported per point.
pub fn optimize_readout(s: &DispersiveScenario, delta_grid: &[f64]) -> Result<Vec<ReadoutPoint>> {
    s.validate()?;
    if delta_grid.is_empty() {
        return Err(Error::Domain("detuning grid is empty".into()));
    }
    let eval = |&delta: &f64| ReadoutPoint {
        delta,
        result: optimize_one(s, delta),
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        Ok(delta_grid.par_iter().map(eval).collect())
    }
    #[cfg(not(feature = "parallel"))]
    {
        Ok(delta_grid.iter().map(eval).collect())
    }
}
