//! Synthetic reflection trace and field sweep, readable by `fit` and `tune`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use spinres::spectroscopy::{frequency_grid, synthesize_trace, DeembedParams, ResonatorParams};

use super::{count_usize, Context};
use crate::error::CliError;
use crate::ingest::{SWEEP_HEADER, TRACE_HEADER};
use crate::output::{Cell, Section, Table};
use crate::units::Unit::*;

pub fn run(ctx: &mut Context) -> Result<Section, CliError> {
    let c = &ctx.config;
    let params = ResonatorParams {
        f_r: c.number("simulate.f_r")?,
        q_i: c.number("simulate.q_i")?,
        q_c: c.number("simulate.q_c")?,
    };
    let bg = DeembedParams {
        amplitude: c.number("simulate.amplitude")?,
        phase_offset: c.number("simulate.phase_offset")?,
        electrical_delay: c.number("simulate.delay")?,
        amplitude_slope: None,
    };
    let noise = c.number("simulate.noise")?;
    let points = count_usize(ctx, "simulate.points")?;
    let freqs = frequency_grid(&params, points, c.number("simulate.linewidths")?);
    let trace = synthesize_trace(&params, &bg, &freqs, noise, ctx.seed)?;
    let mut table = Table::new(TRACE_HEADER);
    for (&f, s) in trace.frequencies().iter().zip(trace.s11()) {
        table.push(vec![f.into(), s.re.into(), s.im.into()]);
    }
    ctx.out.table("trace.csv", &table)?;

    let f0 = c.number("simulate.tune_f0")?;
    let a = c.number("simulate.tune_a")?;
    let n = count_usize(ctx, "simulate.tune_points")?;
    if n < 2 {
        return Err(CliError::Config("simulate.tune_points must be at least 2".into()));
    }
    let b_max = c.number("simulate.tune_b_max")?;
    let sigma = c.number("simulate.tune_noise")?;
    let jump_field = c.number("simulate.jump_field")?;
    let jump = c.number("simulate.jump_size")?;
    let normal = Normal::new(0.0, sigma.abs()).map_err(|e| CliError::Config(format!("simulate.tune_noise: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed.wrapping_add(1));
    let mut sweep = Table::new(SWEEP_HEADER);
    for (direction, forward) in [("up", true), ("down", false)] {
        for k in 0..n {
            let k = if forward { k } else { n - 1 - k };
            let b = b_max * k as f64 / (n - 1) as f64;
            let mut f = f0 * (1.0 - a * b * b) + normal.sample(&mut rng);
            if forward && jump != 0.0 && b >= jump_field {
                f += jump;
            }
            sweep.push(vec![b.into(), 0.0.into(), f.into(), Cell::Empty, direction.into()]);
        }
    }
    ctx.out.table("sweep.csv", &sweep)?;

    let mut injected = Section::new();
    injected
        .quantity("f_r", params.f_r, Frequency)
        .quantity("q_i", params.q_i, Dimensionless)
        .quantity("q_c", params.q_c, Dimensionless)
        .quantity("amplitude", bg.amplitude, Dimensionless)
        .quantity("phase_offset", bg.phase_offset, Angle)
        .quantity("electrical_delay", bg.electrical_delay, Time)
        .quantity("noise", noise, Dimensionless)
        .count("points", points as u64);
    let mut tuning = Section::new();
    tuning
        .quantity("f_r0", f0, Frequency)
        .quantity("a_coeff", a, InverseFieldSquared)
        .quantity("b_max", b_max, Field)
        .quantity("noise", sigma, Frequency)
        .quantity("jump_field", jump_field, Field)
        .quantity("jump_size", jump, Frequency)
        .count("points_per_direction", n as u64);
    let mut out = Section::new();
    out.section("trace", injected).section("sweep", tuning);
    Ok(out)
}
