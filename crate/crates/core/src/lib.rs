//! Design and analysis toolkit for ultra-low-impedance parallel-plate
//! resonators used to detect single electron spins.
//!
//! The crate is split along the physics:
//!
//! * [`circuit`] – lumped-element parameters (current ZPF, impedance,
//!   kinetic inductance, coupling quality factors).
//! * [`field`] – 2D magnetostatic model of the nanowire and its image in the
//!   counter-electrode: ZPF field maps, spin coupling, mode volume and
//!   Purcell factors.
//! * [`spectroscopy`] – reflection (S11) model, synthesis, de-embedding and
//!   resonance fitting, TLS power dependence.
//! * [`tuning`] – magnetic-field tuning of the resonance, alignment search
//!   and hysteresis / vortex-jump detection.
//! * [`protocols`] – photon-counting and dispersive single-spin readout,
//!   with Monte Carlo cross-checks.

// `!(x > 0.0)` is used on purpose so NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod circuit;
pub mod constants;
mod error;
pub mod field;
mod lsq;
pub mod optimize;
pub mod protocols;
pub mod spectroscopy;
pub mod tuning;

pub use error::{Error, Result};
