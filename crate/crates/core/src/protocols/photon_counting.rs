use serde::{Deserialize, Serialize};

use crate::error::{ensure_non_negative, ensure_positive, Error, Result};

/// Regime boundaries sit a factor of this apart from equality.
const REGIME_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhotonCountingScenario {
    /// Spin lifetime (s).
    pub t1: f64,
    /// Detection efficiency.
    pub eta: f64,
    /// Dark-count rate (1/s).
    pub alpha: f64,
    pub snr_target: f64,
}

impl PhotonCountingScenario {
    /// Detector of the reference setup: 0.8 ms spin, 30 % efficiency,
    /// 100 dark counts per second.
    pub fn reference() -> Self {
        Self {
            t1: 0.8e-3,
            eta: 0.3,
            alpha: 100.0,
            snr_target: 2.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive("t1", self.t1)?;
        ensure_non_negative("alpha", self.alpha)?;
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(Error::Domain(format!("eta must lie in (0, 1], got {}", self.eta)));
        }
        Ok(())
    }

    /// Noise per T1 window: dark counts (signal and background) plus
    /// binomial detection noise.
    fn noise_per_window(&self) -> f64 {
        2.0 * self.t1 * self.alpha + self.eta * (1.0 - self.eta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PcRegime {
    ShotNoiseLimited,
    Crossover,
    DarkCountLimited,
}

/// Signal-to-noise ratio after integrating for `tau_m`:
/// `eta sqrt(tau_m / T1) / sqrt(2 T1 alpha + eta (1 - eta))`.
/// A perfect detector without dark counts gives `+inf`.
pub fn pc_snr(s: &PhotonCountingScenario, tau_m: f64) -> Result<f64> {
    s.validate()?;
    ensure_positive("tau_m", tau_m)?;
    let noise = s.noise_per_window();
    if noise == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(s.eta * (tau_m / s.t1).sqrt() / noise.sqrt())
}

/// Integration time reaching `snr_target`:
/// `(SNR / eta)^2 T1 (2 T1 alpha + eta (1 - eta))`.
pub fn pc_integration_time(s: &PhotonCountingScenario) -> Result<f64> {
    s.validate()?;
    ensure_positive("snr_target", s.snr_target)?;
    Ok((s.snr_target / s.eta).powi(2) * s.t1 * s.noise_per_window())
}

/// Whether dark counts or detection shot noise dominate the noise budget.
pub fn pc_regime(s: &PhotonCountingScenario) -> Result<PcRegime> {
    s.validate()?;
    let dark = 2.0 * s.t1 * s.alpha;
    let shot = s.eta * (1.0 - s.eta);
    Ok(if dark * REGIME_FACTOR < shot {
        PcRegime::ShotNoiseLimited
    } else if dark > REGIME_FACTOR * shot {
        PcRegime::DarkCountLimited
    } else {
        PcRegime::Crossover
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn reference_detector() {
        let s = PhotonCountingScenario::reference();
        let tau = pc_integration_time(&s).unwrap();
        assert_relative_eq!(tau, 13.16e-3, max_relative = 1e-3);
        assert_relative_eq!(pc_snr(&s, 13.16e-3).unwrap(), 2.00, epsilon = 5e-3);
        assert_eq!(pc_regime(&s).unwrap(), PcRegime::Crossover);
    }

    #[test]
    fn purcell_enhanced_spin_is_faster() {
        let slow = PhotonCountingScenario::reference();
        let fast = PhotonCountingScenario { t1: 33.16e-6, ..slow };
        let t_slow = pc_integration_time(&slow).unwrap();
        let t_fast = pc_integration_time(&fast).unwrap();
        assert_relative_eq!(t_fast, 319e-6, max_relative = 2e-3);
        assert_relative_eq!(t_slow / t_fast, 41.2, epsilon = 0.05);
    }

    #[test]
    fn limits() {
        let perfect = PhotonCountingScenario {
            eta: 1.0,
            alpha: 0.0,
            ..PhotonCountingScenario::reference()
        };
        assert_eq!(pc_snr(&perfect, 1e-3).unwrap(), f64::INFINITY);

        let dark_free = PhotonCountingScenario {
            alpha: 0.0,
            ..PhotonCountingScenario::reference()
        };
        let a = pc_snr(&dark_free, 1e-3).unwrap();
        let b = pc_snr(&dark_free, 4e-3).unwrap();
        assert_relative_eq!(b / a, 2.0, max_relative = 1e-12);
        assert_eq!(pc_regime(&dark_free).unwrap(), PcRegime::ShotNoiseLimited);

        let t1 = pc_integration_time(&dark_free).unwrap();
        let t2 = pc_integration_time(&PhotonCountingScenario {
            t1: 2.0 * dark_free.t1,
            ..dark_free
        })
        .unwrap();
        assert_relative_eq!(t2 / t1, 2.0, max_relative = 1e-12);

        let long = PhotonCountingScenario {
            t1: 1.0,
            ..PhotonCountingScenario::reference()
        };
        assert_eq!(pc_regime(&long).unwrap(), PcRegime::DarkCountLimited);
    }

    #[test]
    fn domain_errors() {
        let bad = PhotonCountingScenario {
            eta: 0.0,
            ..PhotonCountingScenario::reference()
        };
        assert!(pc_snr(&bad, 1e-3).is_err());
        assert!(pc_snr(&PhotonCountingScenario::reference(), 0.0).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn integration_time_inverts_snr(
            t1 in 1e-6f64..1.0,
            eta in 0.01f64..0.99,
            alpha in 0.0f64..1e4,
            snr in 0.1f64..100.0,
        ) {
            let s = PhotonCountingScenario { t1, eta, alpha, snr_target: snr };
            let tau = pc_integration_time(&s).unwrap();
            let back = pc_snr(&s, tau).unwrap();
            prop_assert!((back / snr - 1.0).abs() < 1e-9);
        }
    }
}
