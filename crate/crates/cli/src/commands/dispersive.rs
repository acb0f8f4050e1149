//! Dispersive single-spin readout: optimal fidelity per detuning.

use std::f64::consts::TAU;

use spinres::protocols::{
    dispersive_pair, dispersive_snr, mc_dispersive, optimize_readout, purcell_t1_detuned, total_fidelity,
    DispersiveScenario, ReadoutOptimum,
};

use super::{count_usize, logspace, Context};
use crate::error::CliError;
use crate::output::{Cell, Section, Table};
use crate::plot::{Axis, PlotKind, PlotSpec, Series};
use crate::units::Unit::*;

/// Points of the fidelity-versus-time curve.
const TIME_POINTS: usize = 81;

fn optimum_section(o: &ReadoutOptimum, saturation: f64) -> Section {
    let mut s = Section::new();
    s.quantity("delta", o.delta_opt / TAU, Frequency)
        .quantity("tau_m", o.tau_m_opt, Time)
        .quantity("fidelity", o.fidelity, Dimensionless)
        .quantity("readout_fidelity", o.readout_fidelity, Dimensionless)
        .quantity("p_e", o.p_e, Dimensionless)
        .quantity("n_bar", o.n_bar, Dimensionless)
        .quantity("t1", o.t1_at_delta, Time)
        .quantity("power", o.power_dbm, PowerDbm)
        .flag("emission_below_saturation", o.power_dbm < saturation);
    s
}

pub fn run(ctx: &mut Context) -> Result<Section, CliError> {
    let c = &ctx.config;
    let f_r = c.number("dispersive.f_r")?;
    let kappa = TAU * f_r / c.number("dispersive.q")?;
    let kc_fraction = c.number("dispersive.kc_fraction")?;
    if !(kc_fraction > 0.0 && kc_fraction <= 1.0) {
        return Err(CliError::Config(format!(
            "dispersive.kc_fraction must lie in (0, 1], got {kc_fraction}"
        )));
    }
    let s = DispersiveScenario {
        g0: c.number("dispersive.g0")?,
        kappa_c: kc_fraction * kappa,
        kappa_i: (1.0 - kc_fraction) * kappa,
        eta: c.number("dispersive.eta")?,
        gamma_nr: c.number("dispersive.gamma")?,
        f_r,
        n_crit_safety: c.number("dispersive.n_crit_safety")?,
    };
    s.validate()?;
    let saturation = c.number("dispersive.saturation")?;
    let grid: Vec<f64> = logspace(
        TAU * c.number("dispersive.delta_min")?,
        TAU * c.number("dispersive.delta_max")?,
        count_usize(ctx, "dispersive.delta_points")?,
    );
    let points = optimize_readout(&s, &grid)?;

    let mut table = Table::new(&[
        "delta_hz",
        "n_bar",
        "tau_m_opt_s",
        "t1_s",
        "fidelity",
        "readout_fidelity",
        "p_e",
        "power_dbm",
        "status",
    ]);
    let mut best: Option<ReadoutOptimum> = None;
    let mut failures = Vec::new();
    for p in &points {
        match &p.result {
            Ok(o) => {
                table.push(vec![
                    (p.delta / TAU).into(),
                    o.n_bar.into(),
                    o.tau_m_opt.into(),
                    o.t1_at_delta.into(),
                    o.fidelity.into(),
                    o.readout_fidelity.into(),
                    o.p_e.into(),
                    o.power_dbm.into(),
                    "ok".into(),
                ]);
                if best.is_none_or(|b| o.fidelity > b.fidelity) {
                    best = Some(*o);
                }
            }
            Err(e) => {
                let code = CliError::from(e.clone()).code();
                let mut row = vec![Cell::Num(p.delta / TAU)];
                row.extend(std::iter::repeat_n(Cell::Empty, 7));
                row.push(code.into());
                table.push(row);
                let mut f = Section::new();
                f.quantity("delta", p.delta / TAU, Frequency).text("error", code);
                failures.push(f);
            }
        }
    }
    ctx.out.table("readout.csv", &table)?;
    let spec = PlotSpec::new(
        "readout_fidelity",
        PlotKind::Line,
        "Peak fidelity versus spin-resonator detuning",
        Axis::log("Delta / 2pi", "Hz"),
        Axis::linear("fidelity", "1"),
    )
    .series(Series::new("delta_hz", "fidelity", "F"))
    .series(Series::new("delta_hz", "readout_fidelity", "F_r").dashed())
    .series(Series::new("delta_hz", "p_e", "P(e)").dashed());
    ctx.plot(&spec, &table)?;
    let spec = PlotSpec::new(
        "readout_time",
        PlotKind::LogLog,
        "Optimal measurement time and spin lifetime",
        Axis::log("Delta / 2pi", "Hz"),
        Axis::log("time", "s"),
    )
    .series(Series::new("delta_hz", "tau_m_opt_s", "tau_m at peak F"))
    .series(Series::new("delta_hz", "t1_s", "T1").dashed());
    ctx.plot(&spec, &table)?;

    // Fidelity versus measurement time at one detuning.
    let delta = TAU * ctx.config.number("dispersive.mc_delta")?;
    let t1 = purcell_t1_detuned(&s, delta)?;
    let mut curve = Table::new(&["tau_s", "fidelity", "readout_fidelity", "p_e"]);
    for tau in logspace(10.0 / s.kappa(), 10.0 * t1, TIME_POINTS) {
        let f = total_fidelity(&s, delta, tau)?;
        curve.push(vec![tau.into(), f.total.into(), f.readout.into(), f.p_e.into()]);
    }
    ctx.out.table("readout_vs_time.csv", &curve)?;
    let spec = PlotSpec::new(
        "readout_vs_time",
        PlotKind::Line,
        "Fidelity versus measurement time",
        Axis::log("tau_m", "s"),
        Axis::linear("probability", "1"),
    )
    .series(Series::new("tau_s", "fidelity", "F"))
    .series(Series::new("tau_s", "readout_fidelity", "F_r").dashed())
    .series(Series::new("tau_s", "p_e", "P(e)").dashed());
    ctx.plot(&spec, &curve)?;

    // Monte Carlo check of the SNR formula.
    let tau = ctx.config.number("dispersive.mc_tau")?;
    let analytic = dispersive_snr(&s, delta, tau, None)?;
    let trials = count_usize(ctx, "dispersive.mc_trials")?;
    let mc = mc_dispersive(&s, delta, tau, None, trials, ctx.seed)?;
    let pair = dispersive_pair(&s, delta)?;
    let mut check = Section::new();
    check
        .quantity("delta", delta / TAU, Frequency)
        .quantity("tau_m", tau, Time)
        .quantity("chi", pair.chi, AngularRate)
        .quantity("n_crit", pair.n_crit, Dimensionless)
        .quantity("n_bar", analytic.n_bar, Dimensionless)
        .quantity("analytic_snr", analytic.snr, Dimensionless)
        .quantity("snr", mc.snr, Dimensionless)
        .quantity("std_error", mc.std_error, Dimensionless)
        .count("trials", mc.trials as u64)
        .flag("within_3_sigma", (mc.snr - analytic.snr).abs() <= 3.0 * mc.std_error);

    let mut scenario = Section::new();
    scenario
        .quantity("g0", s.g0, Frequency)
        .quantity("f_r", s.f_r, Frequency)
        .quantity("kappa", s.kappa(), AngularRate)
        .quantity("kappa_c", s.kappa_c, AngularRate)
        .quantity("eta", s.eta, Dimensionless)
        .quantity("gamma", s.gamma_nr, Rate)
        .quantity("n_crit_safety", s.n_crit_safety, Dimensionless)
        .quantity("saturation", saturation, PowerDbm);

    let mut out = Section::new();
    out.section("scenario", scenario)
        .count("grid_points", grid.len() as u64)
        .list("failures", failures)
        .section("monte_carlo", check);
    match best {
        Some(b) => {
            out.section("best", optimum_section(&b, saturation));
        }
        None => {
            return Err(CliError::Compute(spinres::Error::Domain(
                "no detuning in the grid produced a readout optimum".into(),
            )))
        }
    }
    Ok(out)
}
