//! Lumped-element model of the parallel-plate resonator.
//!
//! The resonator is an LC circuit: the two semi-disk capacitors are shunted
//! by the nanowire, whose inductance (geometric plus kinetic) sets the
//! current zero-point fluctuations `delta_i` that drive the spin coupling.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::constants::HBAR;
use crate::error::{ensure_non_negative, ensure_positive, Error, Result};

/// Geometry and material description of one resonator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviceDesign {
    /// Diameter of the capacitor disk (m).
    pub capacitor_diameter: f64,
    /// Nanowire length `l` (m).
    pub nanowire_length: f64,
    /// Nanowire width `w` (m).
    pub nanowire_width: f64,
    /// Superconducting film thickness `t` (m).
    pub film_thickness: f64,
    /// Dielectric thickness `d` between the two electrodes (m).
    pub dielectric_thickness: f64,
    pub dielectric_epsilon_r: f64,
    /// Kinetic inductance per square (H).
    pub sheet_kinetic_inductance: f64,
}

impl DeviceDesign {
    /// Nb / a-Si:H device with a 300 nm x 10 um nanowire resonating at 7.5 GHz.
    pub fn reference() -> Self {
        Self {
            capacitor_diameter: 825e-6,
            nanowire_length: 10e-6,
            nanowire_width: 300e-9,
            film_thickness: 50e-9,
            dielectric_thickness: 500e-9,
            dielectric_epsilon_r: 11.9,
            sheet_kinetic_inductance: 0.2e-12,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let lengths = [
            ("capacitor_diameter", self.capacitor_diameter),
            ("nanowire_length", self.nanowire_length),
            ("nanowire_width", self.nanowire_width),
            ("film_thickness", self.film_thickness),
            ("dielectric_thickness", self.dielectric_thickness),
        ];
        for (name, value) in lengths {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidGeometry(format!("{name} must be positive, got {value}")));
            }
        }
        if self.nanowire_width > self.capacitor_diameter {
            return Err(Error::InvalidGeometry(
                "nanowire_width exceeds capacitor_diameter".into(),
            ));
        }
        if !(self.dielectric_epsilon_r >= 1.0) {
            return Err(Error::InvalidGeometry(format!(
                "dielectric_epsilon_r must be >= 1, got {}",
                self.dielectric_epsilon_r
            )));
        }
        ensure_non_negative("sheet_kinetic_inductance", self.sheet_kinetic_inductance)
    }
}

/// Kinetic inductance of the nanowire, `L_k = L_k,sq * l / w`.
pub fn kinetic_inductance(design: &DeviceDesign) -> Result<f64> {
    let (l, w) = (design.nanowire_length, design.nanowire_width);
    if !(w.is_finite() && w > 0.0 && l.is_finite() && l > 0.0) {
        return Err(Error::InvalidGeometry(format!(
            "nanowire length and width must be positive, got l={l}, w={w}"
        )));
    }
    ensure_non_negative("sheet_kinetic_inductance", design.sheet_kinetic_inductance)?;
    Ok(design.sheet_kinetic_inductance * l / w)
}

/// Current zero-point fluctuation amplitude `sqrt(hbar w_r / 2L)`.
pub fn current_zpf(inductance: f64, f_r: f64) -> Result<f64> {
    ensure_positive("inductance", inductance)?;
    ensure_positive("f_r", f_r)?;
    Ok((HBAR * TAU * f_r / (2.0 * inductance)).sqrt())
}

/// Mode impedance `(hbar / 2) (w_r / delta_i)^2`.
pub fn impedance(f_r: f64, delta_i: f64) -> Result<f64> {
    ensure_positive("f_r", f_r)?;
    ensure_positive("delta_i", delta_i)?;
    let ratio = TAU * f_r / delta_i;
    Ok(0.5 * HBAR * ratio * ratio)
}

/// Coupling quality factor of a resonator wired directly to a transmission line.
///
/// Returns `line_impedance / z`, the convention that gives 66.6 for a
/// 0.75 Ohm resonator on a 50 Ohm line.
pub fn galvanic_coupling_q(z: f64, line_impedance: f64) -> Result<f64> {
    ensure_positive("resonator impedance", z)?;
    ensure_positive("line impedance", line_impedance)?;
    Ok(line_impedance / z)
}

/// Effective energy decay rate through a lossy filter mode (e.g. a 3D box
/// mode) coupled at rate `g_bus` and detuned by `delta_box`.
///
/// All arguments and the result are angular rates.
pub fn filter_coupling_kappa(g_bus: f64, delta_box: f64, kappa_box: f64) -> Result<f64> {
    ensure_positive("kappa_box", kappa_box)?;
    if !g_bus.is_finite() || !delta_box.is_finite() {
        return Err(Error::Domain("g_bus and delta_box must be finite".into()));
    }
    let half = 0.5 * kappa_box;
    Ok(kappa_box * g_bus * g_bus / (delta_box * delta_box + half * half))
}

/// Loaded, internal and coupling quality factors with the matching decay rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QualityFactors {
    pub q_i: f64,
    pub q_c: f64,
    pub q_total: f64,
    /// Total energy decay rate (rad/s).
    pub kappa: f64,
    pub kappa_c: f64,
    pub kappa_i: f64,
}

/// Combine internal and coupling Q. `q_c` may be infinite (uncoupled).
pub fn quality_factors(q_i: f64, q_c: f64, f_r: f64) -> Result<QualityFactors> {
    ensure_positive("q_i", q_i)?;
    ensure_positive("f_r", f_r)?;
    if !(q_c > 0.0) {
        return Err(Error::Domain(format!("q_c must be positive, got {q_c}")));
    }
    let omega = TAU * f_r;
    let q_total = 1.0 / (1.0 / q_i + 1.0 / q_c);
    Ok(QualityFactors {
        q_i,
        q_c,
        q_total,
        kappa: omega / q_total,
        kappa_c: omega / q_c,
        kappa_i: omega / q_i,
    })
}

/// Self-consistent set of circuit parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircuitParams {
    /// Resonance frequency (Hz).
    pub f_r: f64,
    /// Total inductance (H).
    pub inductance: f64,
    /// Kinetic part of the inductance (H).
    pub kinetic_inductance: f64,
    /// Mode impedance (Ohm).
    pub impedance: f64,
    /// Current ZPF amplitude (A).
    pub delta_i: f64,
}

/// One known circuit quantity, used to build [`CircuitParams`] from any pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Known {
    Frequency(f64),
    Inductance(f64),
    CurrentZpf(f64),
    Impedance(f64),
}

impl Known {
    fn value(self) -> f64 {
        match self {
            Known::Frequency(v) | Known::Inductance(v) | Known::CurrentZpf(v) | Known::Impedance(v) => v,
        }
    }
}

impl CircuitParams {
    /// Derive the full parameter set from two distinct known quantities.
    pub fn from_pair(a: Known, b: Known, kinetic_inductance: f64) -> Result<Self> {
        use Known::*;
        ensure_positive("first circuit quantity", a.value())?;
        ensure_positive("second circuit quantity", b.value())?;
        ensure_non_negative("kinetic_inductance", kinetic_inductance)?;

        // Reduce every pair to (omega, L).
        let (omega, l) = match (a, b) {
            (Frequency(f), Inductance(l)) | (Inductance(l), Frequency(f)) => (TAU * f, l),
            (Frequency(f), CurrentZpf(di)) | (CurrentZpf(di), Frequency(f)) => {
                let w = TAU * f;
                (w, HBAR * w / (2.0 * di * di))
            }
            (Frequency(f), Impedance(z)) | (Impedance(z), Frequency(f)) => {
                let w = TAU * f;
                (w, z / w)
            }
            (Inductance(l), CurrentZpf(di)) | (CurrentZpf(di), Inductance(l)) => (2.0 * di * di * l / HBAR, l),
            (Inductance(l), Impedance(z)) | (Impedance(z), Inductance(l)) => (z / l, l),
            (CurrentZpf(di), Impedance(z)) | (Impedance(z), CurrentZpf(di)) => {
                let w = di * (2.0 * z / HBAR).sqrt();
                (w, z / w)
            }
            _ => return Err(Error::Domain("circuit parameters need two different quantities".into())),
        };
        if kinetic_inductance > l {
            return Err(Error::Domain(format!(
                "kinetic inductance {kinetic_inductance:e} H exceeds total inductance {l:e} H"
            )));
        }
        let f_r = omega / TAU;
        let delta_i = current_zpf(l, f_r)?;
        Ok(Self {
            f_r,
            inductance: l,
            kinetic_inductance,
            impedance: impedance(f_r, delta_i)?,
            delta_i,
        })
    }

    pub fn omega(&self) -> f64 {
        TAU * self.f_r
    }
}
