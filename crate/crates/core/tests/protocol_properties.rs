use proptest::prelude::*;
use spinres::protocols::{
    dispersive_snr, pc_integration_time, total_fidelity, DispersiveScenario, PhotonCountingScenario,
};
use std::f64::consts::TAU;

fn log_slope(f: impl Fn(f64) -> f64, x: f64) -> f64 {
    let h = 1e-4;
    ((f(x * (1.0 + h))).ln() - (f(x * (1.0 - h))).ln()) / ((1.0 + h).ln() - (1.0 - h).ln())
}

#[test]
fn integration_time_regime_slopes() {
    let base = PhotonCountingScenario::reference();
    let tau = |t1: f64| pc_integration_time(&PhotonCountingScenario { t1, ..base }).unwrap();
    // 2 T1 alpha >> eta (1 - eta) at T1 = 10 s, << at 1 us.
    assert!((log_slope(tau, 10.0) - 2.0).abs() < 0.02);
    assert!((log_slope(tau, 1e-6) - 1.0).abs() < 0.01);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn half_critical_snr_closed_form(
        g0 in 1e3f64..1e5,
        q in 1e3f64..1e6,
        kc_frac in 0.05f64..0.95,
        eta in 0.01f64..1.0,
        delta_mhz in 0.5f64..500.0,
        tau in 1e-5f64..1e-1,
    ) {
        let kappa = TAU * 7.5e9 / q;
        let s = DispersiveScenario {
            g0,
            kappa_c: kc_frac * kappa,
            kappa_i: (1.0 - kc_frac) * kappa,
            eta,
            gamma_nr: 1.0,
            f_r: 7.5e9,
            n_crit_safety: 2.0,
        };
        let delta = TAU * delta_mhz * 1e6;
        let snr = dispersive_snr(&s, delta, tau, None).unwrap().snr;
        let g = TAU * g0;
        let chi = g * g / delta;
        let closed = g * (tau * eta * s.kappa_c).sqrt() / ((kappa / 2.0).powi(2) + chi * chi).sqrt();
        prop_assert!((snr / closed - 1.0).abs() < 1e-12);
    }

    #[test]
    fn half_critical_snr_independent_of_detuning(scale in 1.0f64..10.0, delta_mhz in 5.0f64..50.0) {
        let s = DispersiveScenario::reference();
        let d1 = TAU * delta_mhz * 1e6;
        let chi = (TAU * s.g0).powi(2) / d1;
        prop_assume!(chi < s.kappa() / 20.0);
        let a = dispersive_snr(&s, d1, 5e-3, None).unwrap().snr;
        let b = dispersive_snr(&s, scale * d1, 5e-3, None).unwrap().snr;
        prop_assert!((a / b - 1.0).abs() < 1e-3);
    }

    #[test]
    fn fidelity_is_a_probability(
        g0 in 1e2f64..1e6,
        delta_mhz in 0.1f64..1e3,
        tau in 1e-9f64..10.0,
        gamma in 0.0f64..1e3,
    ) {
        let s = DispersiveScenario { g0, gamma_nr: gamma, ..DispersiveScenario::reference() };
        let f = total_fidelity(&s, TAU * delta_mhz * 1e6, tau).unwrap();
        prop_assert!((0.0..=1.0).contains(&f.total));
        prop_assert!((0.0..=1.0).contains(&f.readout));
        prop_assert!((0.0..=1.0).contains(&f.p_e));
    }
}
