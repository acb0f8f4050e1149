//! WebAssembly bindings for the browser demo.
//!
//! Each export takes plain numbers in display units and returns a JSON
//! string; errors come back as a rejected `JsValue` holding the message.

use std::f64::consts::TAU;

use serde_json::{json, Value};
use spinres::circuit::{current_zpf, impedance};
use spinres::field::{
    delta_b, field_map, g0_at, mode_volume_star, purcell_factor, purcell_rate, CrossSection, SpinSpecies, Window,
};
use spinres::protocols::{
    optimize_readout, pc_integration_time, pc_regime, DispersiveScenario, PhotonCountingScenario,
};
use wasm_bindgen::prelude::*;

fn fail(e: impl std::fmt::Display) -> JsValue {
    JsValue::from_str(&e.to_string())
}

fn finite(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        Value::Null
    }
}

/// Geometry in nm, inductance in pH, frequency in GHz. Returns |B| on a
/// grid (null inside the metal and guard), the circuit numbers and the
/// coupling of a free electron and an Er:CaWO4 spin at the probe point.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn field_map_json(
    width_nm: f64,
    thickness_nm: f64,
    dielectric_nm: f64,
    inductance_ph: f64,
    f_r_ghz: f64,
    spacing_nm: f64,
    probe_x_nm: f64,
    probe_y_nm: f64,
) -> Result<String, JsValue> {
    let f_r = f_r_ghz * 1e9;
    let delta_i = current_zpf(inductance_ph * 1e-12, f_r).map_err(fail)?;
    let z = impedance(f_r, delta_i).map_err(fail)?;
    let section =
        CrossSection::new(width_nm * 1e-9, thickness_nm * 1e-9, dielectric_nm * 1e-9, delta_i).map_err(fail)?;
    let window = Window::default_for(&section);
    let map = field_map(&section, &window, spacing_nm * 1e-9).map_err(fail)?;
    let metrics = mode_volume_star(&map, f_r, 1e4).map_err(fail)?;

    let (nx, ny) = (map.xs().len(), map.ys().len());
    let mut magnitude = Vec::with_capacity(nx * ny);
    for iy in 0..ny {
        for ix in 0..nx {
            magnitude.push(map.get(ix, iy).map_or(Value::Null, |b| json!(b[0].hypot(b[1]))));
        }
    }

    let probe = [probe_x_nm * 1e-9, probe_y_nm * 1e-9];
    let probe_json = match delta_b(&section, probe) {
        Ok(b) => {
            let field = b[0].hypot(b[1]);
            let g_free = g0_at(&section, probe, &SpinSpecies::free_electron(), None).map_err(fail)?;
            let g_er = g0_at(&section, probe, &SpinSpecies::erbium_cawo4(), None).map_err(fail)?;
            json!({
                "field_t": field,
                "g0_free_hz": g_free,
                "g0_er_hz": g_er,
                "purcell_factor": finite(purcell_factor(&metrics, 1e4, (field / metrics.b_max).min(1.0)).unwrap_or(f64::NAN)),
            })
        }
        Err(e) => json!({ "error": e.to_string() }),
    };

    Ok(json!({
        "x_nm": map.xs().iter().map(|x| x * 1e9).collect::<Vec<_>>(),
        "y_nm": map.ys().iter().map(|y| y * 1e9).collect::<Vec<_>>(),
        "b_abs_t": magnitude,
        "b_max_t": metrics.b_max,
        "delta_i_a": delta_i,
        "impedance_ohm": z,
        "v_star_over_lambda3": metrics.v_star_over_lambda3,
        "mirror_plane_nm": section.mirror_plane() * 1e9,
        "wire": {
            "width_nm": width_nm,
            "thickness_nm": thickness_nm,
        },
        "probe": probe_json,
    })
    .to_string())
}

/// Fidelity-optimized dispersive readout over a log grid of detunings.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn dispersive_scan_json(
    g0_khz: f64,
    f_r_ghz: f64,
    q: f64,
    kc_fraction: f64,
    eta: f64,
    gamma_nr: f64,
    delta_min_mhz: f64,
    delta_max_mhz: f64,
    points: usize,
) -> Result<String, JsValue> {
    if points < 2 || !(delta_min_mhz > 0.0 && delta_max_mhz > delta_min_mhz) {
        return Err(fail("need at least two points and 0 < delta_min < delta_max"));
    }
    let f_r = f_r_ghz * 1e9;
    let kappa = TAU * f_r / q;
    let s = DispersiveScenario {
        g0: g0_khz * 1e3,
        kappa_c: kc_fraction * kappa,
        kappa_i: (1.0 - kc_fraction) * kappa,
        eta,
        gamma_nr,
        f_r,
        n_crit_safety: 2.0,
    };
    let ratio = delta_max_mhz / delta_min_mhz;
    let grid: Vec<f64> = (0..points)
        .map(|k| TAU * 1e6 * delta_min_mhz * ratio.powf(k as f64 / (points - 1) as f64))
        .collect();
    let scan = optimize_readout(&s, &grid).map_err(fail)?;
    let rows: Vec<Value> = scan
        .iter()
        .map(|p| match &p.result {
            Ok(r) => json!({
                "delta_hz": p.delta / TAU,
                "fidelity": r.fidelity,
                "readout_fidelity": r.readout_fidelity,
                "tau_s": r.tau_m_opt,
                "t1_s": r.t1_at_delta,
                "n_bar": r.n_bar,
                "power_dbm": r.power_dbm,
            }),
            Err(e) => json!({ "delta_hz": p.delta / TAU, "error": e.to_string() }),
        })
        .collect();
    Ok(json!({ "points": rows }).to_string())
}

/// Photon-counting integration time against T1 for one dark-count rate,
/// plus the reference spin before and after Purcell enhancement.
#[wasm_bindgen]
pub fn photon_counting_json(
    t1_ms: f64,
    eta: f64,
    alpha: f64,
    snr: f64,
    g0_khz: f64,
    linewidth_khz: f64,
) -> Result<String, JsValue> {
    let base = PhotonCountingScenario {
        t1: t1_ms * 1e-3,
        eta,
        alpha,
        snr_target: snr,
    };
    let gamma_p = purcell_rate(g0_khz * 1e3, TAU * linewidth_khz * 1e3).map_err(fail)?;
    let enhanced = PhotonCountingScenario {
        t1: 1.0 / gamma_p,
        ..base
    };
    let point = |s: &PhotonCountingScenario| -> Result<Value, JsValue> {
        Ok(json!({
            "t1_s": s.t1,
            "tau_s": pc_integration_time(s).map_err(fail)?,
            "regime": serde_json::to_value(pc_regime(s).map_err(fail)?).map_err(fail)?,
        }))
    };
    let curve: Vec<Value> = (0..=60)
        .map(|k| 1e-6 * 10f64.powf(5.0 * k as f64 / 60.0))
        .map(|t1| {
            let s = PhotonCountingScenario { t1, ..base };
            json!({ "t1_s": t1, "tau_s": pc_integration_time(&s).map(finite).unwrap_or(Value::Null) })
        })
        .collect();
    Ok(json!({
        "curve": curve,
        "reference": point(&base)?,
        "enhanced": point(&enhanced)?,
    })
    .to_string())
}
