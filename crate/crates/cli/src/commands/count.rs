//! Photon-counting integration time for the reference detector and for a
//! Purcell-enhanced spin, plus the (T1, alpha) regime map.

use std::f64::consts::TAU;

use spinres::field::purcell_rate;
use spinres::protocols::{
    mc_photon_counting, pc_integration_time, pc_regime, McEstimate, PcRegime, PhotonCountingScenario,
};

use super::{count_usize, logspace, Context};
use crate::error::CliError;
use crate::output::{format_number, Cell, Section, Table};
use crate::plot::{Axis, PlotKind, PlotSpec, Series};
use crate::units::Unit::*;

/// Dark-count rates drawn in the regime map, besides the configured one.
const MAP_ALPHAS: [f64; 4] = [1.0, 10.0, 100.0, 1000.0];

fn regime_name(r: PcRegime) -> &'static str {
    match r {
        PcRegime::ShotNoiseLimited => "shot-noise-limited",
        PcRegime::Crossover => "crossover",
        PcRegime::DarkCountLimited => "dark-count-limited",
    }
}

fn mc_section(mc: &McEstimate, analytic: f64) -> Section {
    let mut s = Section::new();
    s.quantity("snr", mc.snr, Dimensionless)
        .quantity("std_error", mc.std_error, Dimensionless)
        .quantity("analytic_snr", analytic, Dimensionless)
        .count("trials", mc.trials as u64)
        .flag("within_3_sigma", (mc.snr - analytic).abs() <= 3.0 * mc.std_error);
    s
}

fn scenario(ctx: &Context, s: &PhotonCountingScenario, seed: u64) -> Result<(Section, f64), CliError> {
    let tau = pc_integration_time(s)?;
    let trials = count_usize(ctx, "count.mc_trials")?;
    let mc = mc_photon_counting(s, tau, trials, seed)?;
    let mut out = Section::new();
    out.quantity("t1", s.t1, Time)
        .quantity("eta", s.eta, Dimensionless)
        .quantity("alpha", s.alpha, Rate)
        .quantity("snr_target", s.snr_target, Dimensionless)
        .quantity("tau_m", tau, Time)
        .text("regime", regime_name(pc_regime(s)?))
        .section("monte_carlo", mc_section(&mc, s.snr_target));
    Ok((out, tau))
}

pub fn run(ctx: &mut Context) -> Result<Section, CliError> {
    let c = &ctx.config;
    let reference = PhotonCountingScenario {
        t1: c.number("count.t1")?,
        eta: c.number("count.eta")?,
        alpha: c.number("count.alpha")?,
        snr_target: c.number("count.snr")?,
    };
    let g0 = c.number("count.g0")?;
    let kappa = TAU * c.number("count.linewidth")?;
    let gamma_p = purcell_rate(g0, kappa)?;
    let t1_purcell = 1.0 / (gamma_p + c.number("count.gamma")?);
    let enhanced = PhotonCountingScenario {
        t1: t1_purcell,
        ..reference
    };

    let (ref_section, tau_ref) = scenario(ctx, &reference, ctx.seed)?;
    let (new_section, tau_new) = scenario(ctx, &enhanced, ctx.seed.wrapping_add(1))?;

    // Regime map.
    let c = &ctx.config;
    let t1s = logspace(
        c.number("count.t1_min")?,
        c.number("count.t1_max")?,
        count_usize(ctx, "count.t1_points")?,
    );
    let mut alphas = MAP_ALPHAS.to_vec();
    if !alphas.contains(&reference.alpha) {
        alphas.push(reference.alpha);
        alphas.sort_by(f64::total_cmp);
    }
    let names: Vec<String> = alphas
        .iter()
        .map(|a| format!("tau_m_s_alpha_{}", format_number(*a)))
        .collect();
    let mut columns = vec!["t1_s"];
    columns.extend(names.iter().map(String::as_str));
    let mut table = Table::new(&columns);
    for &t1 in &t1s {
        let mut row = vec![Cell::Num(t1)];
        for &alpha in &alphas {
            let s = PhotonCountingScenario { t1, alpha, ..reference };
            row.push(pc_integration_time(&s)?.into());
        }
        table.push(row);
    }
    ctx.out.table("integration_time.csv", &table)?;

    // Limiting forms through the reference point: tau ~ T1 and tau ~ T1^2.
    let k = (reference.snr_target / reference.eta).powi(2);
    let t0 = reference.t1;
    let shot = k * t0 * reference.eta * (1.0 - reference.eta);
    let dark = k * t0 * 2.0 * t0 * reference.alpha;
    let mut spec = PlotSpec::new(
        "integration_time",
        PlotKind::LogLog,
        "Photon-counting integration time to reach the target SNR",
        Axis::log("T1", "s"),
        Axis::log("tau_m", "s"),
    );
    for (a, name) in alphas.iter().zip(&names) {
        spec = spec.series(Series::new("t1_s", name, &format!("alpha = {} /s", format_number(*a))));
    }
    let spec = spec
        .guide(2.0, (t0, dark), "dark-count limited (slope 2)", "#d62728")
        .guide(1.0, (t0, shot), "shot-noise limited (slope 1)", "#2ca02c")
        .marker((reference.t1, tau_ref), "reference")
        .marker((enhanced.t1, tau_new), "Purcell-enhanced");
    ctx.plot(&spec, &table)?;

    let mut out = Section::new();
    out.section("reference", ref_section)
        .section("purcell_enhanced", new_section)
        .quantity("purcell_rate", gamma_p, Rate)
        .quantity("lifetime_reduction", reference.t1 / t1_purcell, Dimensionless)
        .quantity("speedup", tau_ref / tau_new, Dimensionless);
    Ok(out)
}
