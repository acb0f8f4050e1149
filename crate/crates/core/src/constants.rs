//! CODATA 2018 physical constants (SI).

use std::f64::consts::TAU;

/// Planck constant h (J s), exact.
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Reduced Planck constant h / 2pi (J s).
pub const HBAR: f64 = PLANCK / TAU;
/// Vacuum permeability (H/m).
pub const MU0: f64 = 1.256_637_062_12e-6;
/// Bohr magneton (J/T).
pub const BOHR_MAGNETON: f64 = 9.274_010_078_3e-24;
/// Speed of light in vacuum (m/s), exact.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Boltzmann constant (J/K), exact.
pub const BOLTZMANN: f64 = 1.380_649e-23;
/// Free-electron g-factor.
pub const FREE_ELECTRON_G: f64 = 2.002_319_304_36;

/// Bohr magneton over h, in Hz/T (about 13.996 GHz/T).
pub const BOHR_OVER_H: f64 = BOHR_MAGNETON / PLANCK;
