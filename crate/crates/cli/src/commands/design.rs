//! Circuit numbers, ZPF field map, couplings and Purcell metrics.

use spinres::circuit::{self, CircuitParams, DeviceDesign, Known};
use spinres::field::{self, CrossSection, SpinSpecies, Window};

use super::Context;
use crate::error::CliError;
use crate::output::{Section, Table};
use crate::plot::{Axis, PlotKind, PlotSpec, Series};
use crate::units::Unit::*;

pub fn run(ctx: &mut Context) -> Result<Section, CliError> {
    let c = &ctx.config;
    let design = DeviceDesign {
        capacitor_diameter: c.number("design.capacitor_diameter")?,
        nanowire_length: c.number("design.wire_length")?,
        nanowire_width: c.number("design.wire_width")?,
        film_thickness: c.number("design.film_thickness")?,
        dielectric_thickness: c.number("design.dielectric_thickness")?,
        dielectric_epsilon_r: c.number("design.epsilon_r")?,
        sheet_kinetic_inductance: c.number("design.sheet_kinetic_inductance")?,
    };
    design.validate()?;
    let l_k = circuit::kinetic_inductance(&design)?;
    let f_r = c.number("design.f_r")?;
    let params = CircuitParams::from_pair(
        Known::Frequency(f_r),
        Known::Inductance(c.number("design.inductance")?),
        l_k,
    )?;
    let q_c_galvanic = circuit::galvanic_coupling_q(params.impedance, c.number("design.line_impedance")?)?;
    let q = c.number("design.q")?;

    let section = CrossSection::new(
        design.nanowire_width,
        design.film_thickness,
        design.dielectric_thickness,
        params.delta_i,
    )?
    .with_guard(c.number("design.guard")?)?;
    let half = c.number("design.window_half_width")?;
    let window = Window {
        x_min: -half,
        x_max: half,
        y_min: -c.number("design.window_depth")?,
        y_max: section.mirror_plane(),
    };
    let map = field::field_map(&section, &window, c.number("design.grid_spacing")?)?;
    let metrics = field::mode_volume_star(&map, params.f_r, q)?;

    let spin = [c.number("design.spin_x")?, c.number("design.spin_y")?];
    let b = field::delta_b(&section, spin)?;
    let b_abs = b[0].hypot(b[1]);
    let f_norm = (b_abs / metrics.b_max).min(1.0);
    let f_p = field::purcell_factor(&metrics, q, f_norm)?;
    let kappa = params.omega() / q;

    let mut spins = Vec::new();
    for species in [SpinSpecies::free_electron(), SpinSpecies::erbium_cawo4()] {
        let g0 = field::g0_at(&section, spin, &species, None)?;
        let mut s = Section::new();
        s.text("species", species.name.clone())
            .quantity("g_factor", species.g_factor, Dimensionless)
            .quantity("g0", g0, Frequency)
            .quantity("purcell_rate", field::purcell_rate(g0, kappa)?, Rate);
        spins.push(s);
    }

    let mut table = Table::new(&["x_m", "y_m", "bx_t", "by_t", "b_abs_t"]);
    for (x, y, v) in map.stored() {
        table.push(vec![
            x.into(),
            y.into(),
            v[0].into(),
            v[1].into(),
            v[0].hypot(v[1]).into(),
        ]);
    }
    ctx.out.table("field_map.csv", &table)?;
    let spec = PlotSpec::new(
        "field_map",
        PlotKind::Heatmap,
        "Magnetic field ZPF around the nanowire",
        Axis::linear("x", "m"),
        Axis::linear("y", "m"),
    )
    .series(Series::new("x_m", "y_m", "|dB|"))
    .color("b_abs_t", Axis::linear("|dB|", "T"))
    .marker((spin[0], spin[1]), "spin");
    ctx.plot(&spec, &table)?;

    let mut circuit = Section::new();
    circuit
        .quantity("f_r", params.f_r, Frequency)
        .quantity("inductance", params.inductance, Inductance)
        .quantity("kinetic_inductance", l_k, Inductance)
        .quantity("delta_i", params.delta_i, Current)
        .quantity("impedance", params.impedance, Resistance)
        .quantity("q_c_galvanic", q_c_galvanic, Dimensionless);

    let mut at_spin = Section::new();
    at_spin
        .quantity("x", spin[0], Length)
        .quantity("y", spin[1], Length)
        .quantity("delta_b", b_abs, Field)
        .quantity("f_norm", f_norm, Dimensionless)
        .quantity("purcell_factor", f_p, Dimensionless)
        .list("spins", spins);

    let mut mode = Section::new();
    mode.quantity("v_star", metrics.v_star, Volume)
        .quantity("wavelength", metrics.lambda, Length)
        .quantity("v_star_over_lambda3", metrics.v_star_over_lambda3, Dimensionless)
        .quantity("b_max", metrics.b_max, Field)
        .quantity("q", q, Dimensionless)
        .quantity("purcell_factor_max", metrics.f_p_max, Dimensionless)
        .quantity("kappa", kappa, AngularRate);
    if let Some(at) = map.b_max_at() {
        mode.quantity("b_max_x", at[0], Length)
            .quantity("b_max_y", at[1], Length);
    }

    let mut grid = Section::new();
    grid.quantity("spacing", map.spacing(), Length)
        .quantity("guard", section.guard, Length)
        .count("stored_points", map.stored_len() as u64);

    let mut out = Section::new();
    out.section("circuit", circuit)
        .section("spin_site", at_spin)
        .section("mode", mode)
        .section("field_map", grid);
    Ok(out)
}
