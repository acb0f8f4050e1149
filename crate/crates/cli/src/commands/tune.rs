//! Quadratic field tuning, vortex jumps and up/down hysteresis.

use spinres::tuning::{
    fit_quadratic_tuning, hysteresis_metric, predict_detuning, q_i_summary, SweepDirection, VortexEvent,
};

use super::Context;
use crate::error::CliError;
use crate::ingest::ingest_sweep;
use crate::output::{Cell, Section, Table};
use crate::plot::{Axis, PlotKind, PlotSpec, Series};
use crate::units::Unit::*;

fn direction_name(d: SweepDirection) -> &'static str {
    match d {
        SweepDirection::RampUp => "up",
        SweepDirection::RampDown => "down",
    }
}

fn event(e: &VortexEvent) -> Section {
    let mut s = Section::new();
    s.quantity("field", e.field, Field)
        .text("direction", direction_name(e.direction))
        .quantity("step", e.step, Frequency);
    if let Some(q) = e.q_i_step {
        s.quantity("q_i_step", q, Dimensionless);
    }
    s
}

pub fn run(ctx: &mut Context) -> Result<Section, CliError> {
    let path = ctx.input("tune.sweep")?;
    let records = ingest_sweep(&path)?;
    let fit = fit_quadratic_tuning(&records)?;
    let b_pred = ctx.config.number("tune.predict_field")?;
    let detuning = predict_detuning(&fit, b_pred)?;

    let mut table = Table::new(&[
        "b_tesla",
        "direction",
        "f_r_hz",
        "shift_up_rel",
        "shift_down_rel",
        "model_rel",
        "q_i_up",
        "q_i_down",
    ]);
    let mut order: Vec<usize> = (0..records.len()).collect();
    order.sort_by(|&a, &b| records[a].field_magnitude.total_cmp(&records[b].field_magnitude));
    for k in order {
        let r = &records[k];
        let shift = r.f_r / fit.f_r0 - 1.0;
        let up = r.direction == SweepDirection::RampUp;
        let pick = |v: Option<f64>, want: bool| if want { Cell::from(v) } else { Cell::Empty };
        table.push(vec![
            r.field_magnitude.into(),
            direction_name(r.direction).into(),
            r.f_r.into(),
            pick(Some(shift), up),
            pick(Some(shift), !up),
            (-fit.a_coeff * r.field_magnitude.powi(2)).into(),
            pick(r.q_i, up),
            pick(r.q_i, !up),
        ]);
    }
    ctx.out.table("tuning.csv", &table)?;
    let spec = PlotSpec::new(
        "tuning",
        PlotKind::Line,
        "Relative frequency shift versus in-plane field",
        Axis::linear("|B|", "T"),
        Axis::linear("f_r / f_r0 - 1", "1"),
    )
    .series(Series::new("b_tesla", "shift_up_rel", "ramp up").optional().points())
    .series(
        Series::new("b_tesla", "shift_down_rel", "ramp down")
            .optional()
            .points(),
    )
    .series(Series::new("b_tesla", "model_rel", "quadratic fit").dashed());
    ctx.plot(&spec, &table)?;

    let mut out = Section::new();
    let qi = q_i_summary(&records);
    if qi.is_some() {
        let spec = PlotSpec::new(
            "tuning_qi",
            PlotKind::Line,
            "Internal quality factor versus in-plane field",
            Axis::linear("|B|", "T"),
            Axis::log("Q_i", "1"),
        )
        .series(Series::new("b_tesla", "q_i_up", "ramp up").optional().points())
        .series(Series::new("b_tesla", "q_i_down", "ramp down").optional().points());
        ctx.plot(&spec, &table)?;
    }

    let mut quad = Section::new();
    quad.quantity("f_r0", fit.f_r0, Frequency)
        .quantity("a_coeff", fit.a_coeff, InverseFieldSquared)
        .quantity("residual_rms", fit.residual_rms, Dimensionless)
        .quantity("predict_field", b_pred, Field)
        .quantity("predicted_detuning", detuning, Frequency)
        .list("jumps", fit.jumps.iter().map(event).collect());
    out.text("sweep", path.display().to_string())
        .count("points", records.len() as u64)
        .section("quadratic_fit", quad);

    let split = |d: SweepDirection| -> Vec<_> { records.iter().filter(|r| r.direction == d).copied().collect() };
    let (up, down) = (split(SweepDirection::RampUp), split(SweepDirection::RampDown));
    if !up.is_empty() && !down.is_empty() {
        let h = hysteresis_metric(&up, &down)?;
        let mut hs = Section::new();
        hs.quantity("max_difference", h.max_difference, Frequency)
            .quantity("at_field", h.at_field, Field)
            .list("vortex_events", h.vortex_events.iter().map(event).collect());
        out.section("hysteresis", hs);
    }
    if let Some(q) = qi {
        let mut s = Section::new();
        s.count("count", q.count as u64)
            .quantity("min", q.min, Dimensionless)
            .quantity("max", q.max, Dimensionless)
            .quantity("mean", q.mean, Dimensionless);
        out.section("q_i", s);
    }
    Ok(out)
}
