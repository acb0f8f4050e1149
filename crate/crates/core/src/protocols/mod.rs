//! Single-spin detection schemes: photon counting of the spin's
//! spontaneous emission and dispersive readout of the resonator shift.
//!
//! Unit convention: `g0` and `f_r` in Hz, every rate (`kappa`, `Delta`,
//! `chi`, `gamma`) in rad/s or 1/s. The `2 pi` is applied where `g0`
//! enters a rate.

mod dispersive;
mod monte_carlo;
mod photon_counting;

pub use dispersive::{
    default_delta_grid, dispersive_pair, dispersive_snr, optimize_readout, purcell_t1_detuned, total_fidelity,
    twpa_power_check, DispersivePair, DispersiveScenario, DispersiveSnr, Fidelity, PowerCheck, ReadoutOptimum,
    ReadoutPoint, DEFAULT_SATURATION_DBM,
};
pub use monte_carlo::{mc_dispersive, mc_photon_counting, McEstimate, MIN_TRIALS};
pub use photon_counting::{pc_integration_time, pc_regime, pc_snr, PcRegime, PhotonCountingScenario};

/// Error function.
pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}
