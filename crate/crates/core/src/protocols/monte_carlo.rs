use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Bernoulli, Binomial, Distribution, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use super::dispersive::{dispersive_pair, DispersiveScenario};
use super::photon_counting::PhotonCountingScenario;
use crate::error::{ensure_non_negative, ensure_positive, Error, Result};

pub const MIN_TRIALS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub snr: f64,
    pub std_error: f64,
    pub trials: usize,
}

fn check_trials(trials: usize) -> Result<()> {
    if trials < MIN_TRIALS {
        return Err(Error::Domain(format!(
            "need at least {MIN_TRIALS} trials, got {trials}"
        )));
    }
    Ok(())
}

struct Moments {
    mean: f64,
    var: f64,
    /// Variance of the sample variance.
    var_of_var: f64,
}

fn moments(x: &[f64]) -> Moments {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let m4 = x.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / n;
    Moments {
        mean,
        var,
        var_of_var: (m4 - var * var).max(0.0) / n,
    }
}

/// SNR `(mean_a - mean_b) / sqrt(var_a + var_b)` with a delta-method
/// standard error.
fn snr_estimate(a: &[f64], b: &[f64], pooled: bool) -> McEstimate {
    let (ma, mb) = (moments(a), moments(b));
    let n = a.len();
    let diff = ma.mean - mb.mean;
    let (s2, var_s2) = if pooled {
        (0.5 * (ma.var + mb.var), 0.25 * (ma.var_of_var + mb.var_of_var))
    } else {
        (ma.var + mb.var, ma.var_of_var + mb.var_of_var)
    };
    if s2 == 0.0 {
        let snr = if diff == 0.0 { 0.0 } else { f64::INFINITY };
        return McEstimate {
            snr,
            std_error: 0.0,
            trials: n,
        };
    }
    let var_diff = (ma.var + mb.var) / n as f64;
    // d(D/S)/dS^2 = -D / (2 S^3)
    let se2 = var_diff / s2 + diff * diff * var_s2 / (4.0 * s2 * s2 * s2);
    McEstimate {
        snr: diff.abs() / s2.sqrt(),
        std_error: se2.sqrt(),
        trials: n,
    }
}

/// Photon-counting trials: the spin emits one photon per `T1` of the
/// integration window, each detected with probability `eta`, on top of
/// Poisson dark counts. Background trials see dark counts only.
pub fn mc_photon_counting(s: &PhotonCountingScenario, tau_m: f64, trials: usize, seed: u64) -> Result<McEstimate> {
    s.validate()?;
    ensure_positive("tau_m", tau_m)?;
    check_trials(trials)?;

    let windows = tau_m / s.t1;
    let whole = windows.floor();
    let frac = windows - whole;
    let derr = |e: &dyn std::fmt::Display| Error::Domain(e.to_string());
    let detected = Binomial::new(whole as u64, s.eta).map_err(|e| derr(&e))?;
    let partial = Bernoulli::new(frac * s.eta).map_err(|e| derr(&e))?;
    let dark_mean = s.alpha * tau_m;
    let dark = if dark_mean > 0.0 {
        Some(Poisson::new(dark_mean).map_err(|e| derr(&e))?)
    } else {
        None
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut signal = Vec::with_capacity(trials);
    let mut background = Vec::with_capacity(trials);
    for _ in 0..trials {
        let mut counts = detected.sample(&mut rng) as f64;
        if partial.sample(&mut rng) {
            counts += 1.0;
        }
        let (d_sig, d_bg): (f64, f64) = match &dark {
            Some(p) => (p.sample(&mut rng), p.sample(&mut rng)),
            None => (0.0, 0.0),
        };
        signal.push(counts + d_sig);
        background.push(d_bg);
    }
    Ok(snr_estimate(&signal, &background, false))
}

/// Homodyne trials: the integrated record for each spin state is
/// `S11_g/e sqrt(2 N_in tau_m eta)` plus unit-variance complex Gaussian
/// noise, projected onto the direction separating the two states.
/// Without `n_bar` the drive sits at `n_crit / n_crit_safety`.
pub fn mc_dispersive(
    s: &DispersiveScenario,
    delta: f64,
    tau_m: f64,
    n_bar: Option<f64>,
    trials: usize,
    seed: u64,
) -> Result<McEstimate> {
    let pair = dispersive_pair(s, delta)?;
    ensure_positive("tau_m", tau_m)?;
    check_trials(trials)?;
    let n_bar = match n_bar {
        Some(n) => {
            ensure_non_negative("n_bar", n)?;
            n
        }
        None => pair.n_crit / s.n_crit_safety,
    };
    let half = 0.5 * s.kappa();
    let photon_rate = n_bar * (half * half + pair.chi * pair.chi) / s.kappa_c;
    let amplitude = (2.0 * photon_rate * tau_m * s.eta).sqrt();
    // S_e - S_g is along -i sign(chi).
    let axis = Complex64::new(0.0, if pair.chi < 0.0 { 1.0 } else { -1.0 });

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |mean: Complex64| -> f64 {
        let z = mean + Complex64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng));
        (z * axis.conj()).re
    };
    let (mut g, mut e) = (Vec::with_capacity(trials), Vec::with_capacity(trials));
    for _ in 0..trials {
        g.push(draw(pair.s11_g * amplitude));
        e.push(draw(pair.s11_e * amplitude));
    }
    Ok(snr_estimate(&e, &g, true))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocols::{dispersive_snr, pc_snr};
    use std::f64::consts::TAU;

    #[test]
    fn photon_counting_matches_analytic() {
        let s = PhotonCountingScenario::reference();
        let tau = 16.0 * s.t1;
        let mc = mc_photon_counting(&s, tau, 20_000, 3).unwrap();
        let exact = pc_snr(&s, tau).unwrap();
        assert!(
            (mc.snr - exact).abs() < 3.0 * mc.std_error,
            "{} vs {exact} +- {}",
            mc.snr,
            mc.std_error
        );
    }

    #[test]
    fn perfect_detector_is_noiseless() {
        let s = PhotonCountingScenario {
            eta: 1.0,
            alpha: 0.0,
            ..PhotonCountingScenario::reference()
        };
        let mc = mc_photon_counting(&s, 10.0 * s.t1, 1000, 0).unwrap();
        assert_eq!(mc.snr, f64::INFINITY);
    }

    #[test]
    fn seeded_runs_repeat() {
        let s = PhotonCountingScenario::reference();
        let a = mc_photon_counting(&s, 13.16e-3, 2000, 9).unwrap();
        let b = mc_photon_counting(&s, 13.16e-3, 2000, 9).unwrap();
        assert_eq!(a, b);
        assert!(mc_photon_counting(&s, 13.16e-3, 10, 9).is_err());
    }

    #[test]
    fn dispersive_matches_analytic() {
        let s = DispersiveScenario::reference();
        let delta = TAU * 10e6;
        let mc = mc_dispersive(&s, delta, 1e-3, None, 20_000, 5).unwrap();
        let exact = dispersive_snr(&s, delta, 1e-3, None).unwrap().snr;
        assert!(
            (mc.snr - exact).abs() < 3.0 * mc.std_error,
            "{} vs {exact} +- {}",
            mc.snr,
            mc.std_error
        );
    }

    #[test]
    fn indistinguishable_states() {
        let s = DispersiveScenario {
            g0: 1e-9,
            ..DispersiveScenario::reference()
        };
        let mc = mc_dispersive(&s, TAU * 10e6, 1e-3, Some(10.0), 20_000, 1).unwrap();
        assert!(mc.snr < 3.0 * mc.std_error);
    }
}
