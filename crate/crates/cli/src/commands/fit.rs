//! De-embedding and resonance fit of one reflection trace.

use spinres::spectroscopy::{self, deembed_with, fit_resonance, model_s11, ComplexTrace, DeembedOptions};

use super::Context;
use crate::error::CliError;
use crate::ingest::ingest_trace;
use crate::output::{Section, Table};
use crate::plot::{Axis, PlotKind, PlotSpec, Series};
use crate::units::Unit::{self, *};

fn db(x: f64) -> f64 {
    20.0 * x.log10()
}

pub fn run(ctx: &mut Context) -> Result<Section, CliError> {
    let path = ctx.input("fit.trace")?;
    let rows = ingest_trace(&path)?;
    let power_dbm = ctx.config.number_opt("fit.power_at_sample")?;
    let power_w = power_dbm.map(|p| 1e-3 * 10f64.powf(p / 10.0));
    let trace = ComplexTrace::new(
        rows.iter().map(|r| r.freq).collect(),
        rows.iter().map(|r| r.s11).collect(),
        power_w,
    )?;
    let options = DeembedOptions {
        fit_amplitude_slope: ctx.config.flag("fit.amplitude_slope")?,
        ..DeembedOptions::default()
    };
    let (corrected, bg) = deembed_with(&trace, options)?;
    let fit = fit_resonance(&corrected, None)?;
    let p = fit.params();
    let fc = trace.center_frequency();

    let mut table = Table::new(&[
        "freq_hz",
        "re",
        "im",
        "re_model",
        "im_model",
        "mag_db",
        "mag_model_db",
        "re_corrected",
        "im_corrected",
    ]);
    for ((&f, &s), &c) in trace.frequencies().iter().zip(trace.s11()).zip(corrected.s11()) {
        let m = bg.background(f, fc) * model_s11(f, p.f_r, p.kappa_c(), p.kappa_i())?;
        table.push(vec![
            f.into(),
            s.re.into(),
            s.im.into(),
            m.re.into(),
            m.im.into(),
            db(s.norm()).into(),
            db(m.norm()).into(),
            c.re.into(),
            c.im.into(),
        ]);
    }
    ctx.out.table("fit.csv", &table)?;
    let spec = PlotSpec::new(
        "fit_magnitude",
        PlotKind::Line,
        "Reflection magnitude",
        Axis::linear("frequency", "Hz"),
        Axis::linear("|S11|", "dB"),
    )
    .series(Series::new("freq_hz", "mag_db", "data").points())
    .series(Series::new("freq_hz", "mag_model_db", "fit").dashed());
    ctx.plot(&spec, &table)?;
    let spec = PlotSpec::new(
        "fit_locus",
        PlotKind::Line,
        "De-embedded reflection locus",
        Axis::linear("Re S11", "1"),
        Axis::linear("Im S11", "1"),
    )
    .series(Series::new("re_corrected", "im_corrected", "de-embedded data").points());
    ctx.plot(&spec, &table)?;

    let mut resonator = Section::new();
    resonator
        .quantity("f_r", fit.f_r, Frequency)
        .quantity("q_i", fit.q_i, Dimensionless)
        .quantity("q_c", fit.q_c, Dimensionless)
        .quantity("q_total", p.q_total(), Dimensionless)
        .quantity("linewidth", p.linewidth(), Frequency)
        .quantity("kappa_c", p.kappa_c(), AngularRate)
        .quantity("kappa_i", p.kappa_i(), AngularRate)
        .quantity("residual_rms", fit.residual_rms, Dimensionless);
    let mut errors = Section::new();
    errors
        .quantity("f_r", fit.uncertainties.f_r, Frequency)
        .quantity("q_i", fit.uncertainties.q_i, Dimensionless)
        .quantity("q_c", fit.uncertainties.q_c, Dimensionless);
    resonator.section("std_errors", errors);

    let mut background = Section::new();
    background
        .quantity("amplitude", bg.amplitude, Dimensionless)
        .quantity("phase_offset", bg.phase_offset, Angle)
        .quantity("electrical_delay", bg.electrical_delay, Time)
        .quantity("phase_at_center", bg.background(fc, fc).arg(), Angle)
        .quantity("center_frequency", fc, Frequency);
    if let Some(s) = bg.amplitude_slope {
        background.quantity("amplitude_slope", s, Unit::PerHertz);
    }

    let mut out = Section::new();
    out.text("trace", path.display().to_string())
        .count("points", trace.len() as u64)
        .section("resonator", resonator)
        .section("background", background);
    if let (Some(dbm), Some(w)) = (power_dbm, power_w) {
        let n = spectroscopy::photon_number_from_power(w, p.f_r, p.kappa_c(), p.kappa(), 0.0)?;
        let mut drive = Section::new();
        drive
            .quantity("power_at_sample", dbm, PowerDbm)
            .quantity("photon_number", n, Dimensionless);
        out.section("drive", drive);
    }
    Ok(out)
}
