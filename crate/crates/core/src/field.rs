//! Magnetostatic model of the nanowire cross-section.
//!
//! The nanowire is a `w x t` rectangle of uniform current density carrying
//! `+delta_i` along the wire axis (z). The counter-electrode surface at
//! `y = t + d` acts as a superconducting mirror, so its screening current is
//! represented by an image rectangle carrying `-delta_i`, mirrored about that
//! surface. Coordinates: the wire occupies `x in [-w/2, w/2]`,
//! `y in [0, t]`; the substrate is `y < 0`.
//!
//! The field of a uniformly filled rectangle has a closed form (sums of
//! `log` and `atan` terms over the four corners), so evaluating a map is a
//! pure per-point computation with no quadrature. The field is finite
//! everywhere but the model says nothing about the interior of the
//! conductors, so points inside them, or closer than the guard distance, are
//! excluded.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::constants::{BOHR_OVER_H, FREE_ELECTRON_G, MU0, PLANCK, SPEED_OF_LIGHT};
use crate::error::{ensure_positive, Error, Result};

/// Default exclusion distance around conductor surfaces (m).
pub const DEFAULT_GUARD: f64 = 5e-9;

// Guard comparisons tolerate grid round-off so that mirrored points are
// classified identically.
const GUARD_SLACK: f64 = 1e-9;

/// Cross-section of the nanowire region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossSection {
    /// Strip width `w` (m).
    pub width: f64,
    /// Film thickness `t` (m).
    pub thickness: f64,
    /// Dielectric thickness `d` (m).
    pub dielectric_thickness: f64,
    /// Current ZPF amplitude (A).
    pub delta_i: f64,
    /// Exclusion distance around conductors (m).
    pub guard: f64,
}

#[derive(Debug, Clone, Copy)]
struct Rect {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Rect {
    fn distance(&self, x: f64, y: f64) -> f64 {
        let dx = (self.x0 - x).max(x - self.x1).max(0.0);
        let dy = (self.y0 - y).max(y - self.y1).max(0.0);
        dx.hypot(dy)
    }
}

impl CrossSection {
    pub fn new(width: f64, thickness: f64, dielectric_thickness: f64, delta_i: f64) -> Result<Self> {
        Self {
            width,
            thickness,
            dielectric_thickness,
            delta_i,
            guard: DEFAULT_GUARD,
        }
        .validated()
    }

    pub fn with_guard(mut self, guard: f64) -> Result<Self> {
        self.guard = guard;
        self.validated()
    }

    fn validated(self) -> Result<Self> {
        for (name, v) in [
            ("width", self.width),
            ("thickness", self.thickness),
            ("dielectric_thickness", self.dielectric_thickness),
            ("delta_i", self.delta_i),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidGeometry(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.guard.is_finite() && self.guard >= 0.0) {
            return Err(Error::InvalidGeometry(format!(
                "guard must be >= 0, got {}",
                self.guard
            )));
        }
        Ok(self)
    }

    /// Height of the counter-electrode surface, `t + d`.
    pub fn mirror_plane(&self) -> f64 {
        self.thickness + self.dielectric_thickness
    }

    /// Uniform current density in the wire (A/m^2).
    pub fn current_density(&self) -> f64 {
        self.delta_i / (self.width * self.thickness)
    }

    fn wire(&self) -> Rect {
        Rect {
            x0: -0.5 * self.width,
            x1: 0.5 * self.width,
            y0: 0.0,
            y1: self.thickness,
        }
    }

    fn image(&self) -> Rect {
        let m = 2.0 * self.mirror_plane();
        Rect {
            x0: -0.5 * self.width,
            x1: 0.5 * self.width,
            y0: m - self.thickness,
            y1: m,
        }
    }

    /// True when `(x, y)` is inside the wire, within the guard distance of
    /// it, or on the counter-electrode side of `t + d - guard`.
    pub fn is_excluded(&self, x: f64, y: f64) -> bool {
        let guard = self.guard * (1.0 - GUARD_SLACK);
        let wire = self.wire();
        let inside_wire = x > wire.x0 && x < wire.x1 && y > wire.y0 && y < wire.y1;
        inside_wire || wire.distance(x, y) < guard || y > self.mirror_plane() - guard
    }
}

/// Field of a rectangle carrying uniform current density `j` along +z.
///
/// With `u = x - x'`, `v = y - y'`, the line-current kernel integrates to
/// `G(u, v) = u ln(u^2 + v^2) / 2 + v atan(u / v)` for `Bx` and the same
/// with `u, v` swapped for `By`; terms linear in `u` or `v` cancel in the
/// four-corner sum and are dropped.
fn rect_field(rect: &Rect, j: f64, x: f64, y: f64) -> [f64; 2] {
    fn g(u: f64, v: f64) -> f64 {
        let r2 = u * u + v * v;
        let log_term = if r2 > 0.0 { 0.5 * u * r2.ln() } else { 0.0 };
        let atan_term = if v != 0.0 { v * (u / v).atan() } else { 0.0 };
        log_term + atan_term
    }
    let corners = |f: &dyn Fn(f64, f64) -> f64| {
        let (u0, u1) = (x - rect.x0, x - rect.x1);
        let (v0, v1) = (y - rect.y0, y - rect.y1);
        f(u0, v0) - f(u1, v0) - f(u0, v1) + f(u1, v1)
    };
    let pref = MU0 * j / TAU;
    let bx = -pref * corners(&|u, v| g(u, v));
    let by = pref * corners(&|u, v| g(v, u));
    [bx, by]
}

/// Field of the nanowire alone (no guard check).
pub fn wire_field(section: &CrossSection, point: [f64; 2]) -> [f64; 2] {
    rect_field(&section.wire(), section.current_density(), point[0], point[1])
}

/// Field of the image current in the counter-electrode alone (no guard check).
pub fn image_field(section: &CrossSection, point: [f64; 2]) -> [f64; 2] {
    rect_field(&section.image(), -section.current_density(), point[0], point[1])
}

/// Which current distributions contribute to a field evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FieldModel {
    /// Nanowire plus its image in the counter-electrode.
    WithImage,
    /// Nanowire alone, as for a single-layer resonator.
    WireOnly,
}

fn field_unchecked(section: &CrossSection, point: [f64; 2], model: FieldModel) -> [f64; 2] {
    let w = wire_field(section, point);
    match model {
        FieldModel::WireOnly => w,
        FieldModel::WithImage => {
            let i = image_field(section, point);
            [w[0] + i[0], w[1] + i[1]]
        }
    }
}

/// Magnetic ZPF vector `(Bx, By)` in tesla at `point` (m).
pub fn delta_b(section: &CrossSection, point: [f64; 2]) -> Result<[f64; 2]> {
    if section.is_excluded(point[0], point[1]) {
        return Err(Error::GuardZone {
            x: point[0],
            y: point[1],
        });
    }
    Ok(field_unchecked(section, point, FieldModel::WithImage))
}

/// Rectangular evaluation window (m).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Window {
    /// +-1 um laterally, from 0.5 um into the substrate up to the
    /// counter-electrode surface.
    pub fn default_for(section: &CrossSection) -> Self {
        Self {
            x_min: -1e-6,
            x_max: 1e-6,
            y_min: -0.5e-6,
            y_max: section.mirror_plane(),
        }
    }
}

/// Sampled magnetic ZPF over a grid anchored at the origin.
///
/// Grid coordinates are integer multiples of the spacing, so windows that
/// are symmetric about `x = 0` produce exactly mirrored grids.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldMap {
    spacing: f64,
    xs: Vec<f64>,
    ys: Vec<f64>,
    // Row-major, `ys` outer.
    values: Vec<Option<[f64; 2]>>,
    b_max: f64,
    b_max_at: Option<[f64; 2]>,
}

impl FieldMap {
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    /// Field at grid index `(ix, iy)`; `None` for excluded points.
    pub fn get(&self, ix: usize, iy: usize) -> Option<[f64; 2]> {
        self.values[iy * self.xs.len() + ix]
    }

    /// Largest stored `|B|` (T).
    pub fn b_max(&self) -> f64 {
        self.b_max
    }

    /// Location of [`FieldMap::b_max`], if any point is stored.
    pub fn b_max_at(&self) -> Option<[f64; 2]> {
        self.b_max_at
    }

    /// Number of stored (non-excluded) points.
    pub fn stored_len(&self) -> usize {
        self.values.iter().filter(|v| v.is_some()).count()
    }

    /// Iterate stored points as `(x, y, [Bx, By])`.
    pub fn stored(&self) -> impl Iterator<Item = (f64, f64, [f64; 2])> + '_ {
        let nx = self.xs.len();
        self.values
            .iter()
            .enumerate()
            .filter_map(move |(k, v)| v.map(|b| (self.xs[k % nx], self.ys[k / nx], b)))
    }
}

fn grid_axis(lo: f64, hi: f64, spacing: f64) -> Vec<f64> {
    let k0 = (lo / spacing - 1e-9).ceil() as i64;
    let k1 = (hi / spacing + 1e-9).floor() as i64;
    (k0..=k1).map(|k| k as f64 * spacing).collect()
}

/// Evaluate the ZPF field (nanowire plus image) on a grid.
pub fn field_map(section: &CrossSection, window: &Window, spacing: f64) -> Result<FieldMap> {
    field_map_with(section, window, spacing, FieldModel::WithImage)
}

/// Evaluate the ZPF field on a grid for the chosen current model.
pub fn field_map_with(section: &CrossSection, window: &Window, spacing: f64, model: FieldModel) -> Result<FieldMap> {
    ensure_positive("spacing", spacing)?;
    let finite = [window.x_min, window.x_max, window.y_min, window.y_max]
        .iter()
        .all(|v| v.is_finite());
    if !finite || window.x_min > window.x_max || window.y_min > window.y_max {
        return Err(Error::EmptyWindow);
    }
    let xs = grid_axis(window.x_min, window.x_max, spacing);
    let ys = grid_axis(window.y_min, window.y_max, spacing);
    if xs.is_empty() || ys.is_empty() {
        return Err(Error::EmptyWindow);
    }

    let eval_row = |y: f64| -> Vec<Option<[f64; 2]>> {
        xs.iter()
            .map(|&x| (!section.is_excluded(x, y)).then(|| field_unchecked(section, [x, y], model)))
            .collect()
    };

    #[cfg(feature = "parallel")]
    let rows: Vec<Vec<Option<[f64; 2]>>> = {
        use rayon::prelude::*;
        ys.par_iter().map(|&y| eval_row(y)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let rows: Vec<Vec<Option<[f64; 2]>>> = ys.iter().map(|&y| eval_row(y)).collect();

    let values: Vec<Option<[f64; 2]>> = rows.into_iter().flatten().collect();

    let nx = xs.len();
    let mut b_max = 0.0;
    let mut b_max_at = None;
    for (k, v) in values.iter().enumerate() {
        if let Some(b) = v {
            let m = b[0].hypot(b[1]);
            if b_max_at.is_none() || m > b_max {
                b_max = m;
                b_max_at = Some([xs[k % nx], ys[k / nx]]);
            }
        }
    }
    Ok(FieldMap {
        spacing,
        xs,
        ys,
        values,
        b_max,
        b_max_at,
    })
}

/// Spin species with an isotropic effective g-factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpinSpecies {
    pub name: String,
    /// Gyromagnetic ratio `g muB / h` (Hz/T).
    pub gyro_ratio: f64,
    pub g_factor: f64,
    /// Decay rate into all non-resonator channels (1/s).
    pub nonradiative_rate: f64,
    /// Default quantization axis (unit vector).
    pub quantization_axis: [f64; 3],
}

impl SpinSpecies {
    pub fn new(name: &str, g_factor: f64, nonradiative_rate: f64, quantization_axis: [f64; 3]) -> Result<Self> {
        ensure_positive("g_factor", g_factor)?;
        if !(nonradiative_rate.is_finite() && nonradiative_rate >= 0.0) {
            return Err(Error::Domain(format!(
                "nonradiative_rate must be >= 0, got {nonradiative_rate}"
            )));
        }
        Ok(Self {
            name: name.to_owned(),
            gyro_ratio: g_factor * BOHR_OVER_H,
            g_factor,
            nonradiative_rate,
            quantization_axis: unit(quantization_axis)?,
        })
    }

    /// Free electron, quantized along the wire axis.
    pub fn free_electron() -> Self {
        Self::new("free electron", FREE_ELECTRON_G, 1e-3, [0.0, 0.0, 1.0]).expect("valid species")
    }

    /// Er3+ in CaWO4 with an effective g of 8.38.
    pub fn erbium_cawo4() -> Self {
        Self::new("Er:CaWO4", 8.38, 1.0, [0.0, 0.0, 1.0]).expect("valid species")
    }
}

fn unit(v: [f64; 3]) -> Result<[f64; 3]> {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if !n.is_finite() || (n - 1.0).abs() > 1e-9 {
        return Err(Error::Domain(format!("direction must be a unit vector, |v| = {n}")));
    }
    Ok(v)
}

/// Spin-resonator coupling `g0 = |dB_perp| * gyro_ratio / 2` in Hz.
///
/// `dB_perp` is the part of the in-plane ZPF perpendicular to
/// `b0_direction`; `None` uses the species' own quantization axis.
pub fn g0_at(
    section: &CrossSection,
    point: [f64; 2],
    spin: &SpinSpecies,
    b0_direction: Option<[f64; 3]>,
) -> Result<f64> {
    let axis = unit(b0_direction.unwrap_or(spin.quantization_axis))?;
    let b = delta_b(section, point)?;
    let b3 = [b[0], b[1], 0.0];
    let along = b3[0] * axis[0] + b3[1] * axis[1];
    let perp = [b3[0] - along * axis[0], b3[1] - along * axis[1], -along * axis[2]];
    let perp_mag = (perp[0] * perp[0] + perp[1] * perp[1] + perp[2] * perp[2]).sqrt();
    Ok(0.5 * perp_mag * spin.gyro_ratio)
}

/// Modified mode volume and derived metrics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeMetrics {
    /// Half the zero-point energy over the peak ZPF energy density (m^3).
    pub v_star: f64,
    /// Free-space wavelength `c / f_r` (m).
    pub lambda: f64,
    pub v_star_over_lambda3: f64,
    /// Peak ZPF field used for the normalization (T).
    pub b_max: f64,
    /// Quality factor the Purcell factor below refers to.
    pub q: f64,
    /// Purcell factor at the field maximum.
    pub f_p_max: f64,
}

/// `V* = (h f_r / 4) / (B_max^2 / 2 mu0)` from a field map.
pub fn mode_volume_star(map: &FieldMap, f_r: f64, q: f64) -> Result<ModeMetrics> {
    ensure_positive("f_r", f_r)?;
    ensure_positive("q", q)?;
    if map.b_max_at().is_none() {
        return Err(Error::DegenerateField("map has no stored points".into()));
    }
    mode_metrics_from_peak(map.b_max(), f_r, q)
}

/// Same as [`mode_volume_star`] from a known peak field.
pub fn mode_metrics_from_peak(b_max: f64, f_r: f64, q: f64) -> Result<ModeMetrics> {
    if !(b_max.is_finite() && b_max > 0.0) {
        return Err(Error::DegenerateField(format!("peak field is {b_max}")));
    }
    let energy_density = b_max * b_max / (2.0 * MU0);
    let v_star = 0.25 * PLANCK * f_r / energy_density;
    let lambda = SPEED_OF_LIGHT / f_r;
    let ratio = v_star / lambda.powi(3);
    Ok(ModeMetrics {
        v_star,
        lambda,
        v_star_over_lambda3: ratio,
        b_max,
        q,
        f_p_max: purcell_from_ratio(q, ratio, 1.0),
    })
}

fn purcell_from_ratio(q: f64, v_over_l3: f64, f_norm: f64) -> f64 {
    3.0 / (4.0 * PI * PI) * q / v_over_l3 * f_norm * f_norm
}

/// Purcell factor `3/(4 pi^2) Q/(V*/lambda^3) |f|^2` for a normalized
/// field profile value `f_norm = |dB| / B_max`.
pub fn purcell_factor(metrics: &ModeMetrics, q: f64, f_norm: f64) -> Result<f64> {
    ensure_positive("q", q)?;
    if !(0.0..=1.0).contains(&f_norm) {
        return Err(Error::Domain(format!("f_norm must lie in [0, 1], got {f_norm}")));
    }
    ensure_positive("V*/lambda^3", metrics.v_star_over_lambda3)?;
    Ok(purcell_from_ratio(q, metrics.v_star_over_lambda3, f_norm))
}

/// Resonant Purcell emission rate `4 (2 pi g0)^2 / kappa` (1/s), with `g0`
/// in Hz and `kappa` in rad/s.
pub fn purcell_rate(g0: f64, kappa: f64) -> Result<f64> {
    ensure_positive("g0", g0)?;
    ensure_positive("kappa", kappa)?;
    let g = TAU * g0;
    Ok(4.0 * g * g / kappa)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn reference() -> CrossSection {
        CrossSection::new(300e-9, 50e-9, 500e-9, 394.9e-9).unwrap()
    }

    fn mag(b: [f64; 2]) -> f64 {
        b[0].hypot(b[1])
    }

    #[test]
    fn fiducial_point_field() {
        let b = delta_b(&reference(), [0.0, -50e-9]).unwrap();
        assert_relative_eq!(mag(b), 511e-9, max_relative = 0.10);
        // On the symmetry axis the field is purely along x.
        assert!(b[1].abs() < 1e-12 * mag(b));
    }

    #[test]
    fn guard_zone_rejected() {
        let s = reference();
        assert!(matches!(delta_b(&s, [0.0, 25e-9]), Err(Error::GuardZone { .. })));
        assert!(matches!(delta_b(&s, [0.0, -2e-9]), Err(Error::GuardZone { .. })));
        assert!(matches!(delta_b(&s, [0.0, 549e-9]), Err(Error::GuardZone { .. })));
        assert!(delta_b(&s, [0.0, -5e-9]).is_ok());
        assert!(delta_b(&s, [155e-9, 25e-9]).is_ok());
    }

    #[test]
    fn far_field_cancels() {
        let s = reference();
        let b = mag(delta_b(&s, [0.0, -20e-6]).unwrap());
        let single = MU0 * s.delta_i / (TAU * 20e-6);
        assert!(b < 0.05 * single, "ratio {}", b / single);
    }

    #[test]
    fn line_current_limit() {
        let s = CrossSection::new(300e-9, 50e-9, 1.0, 394.9e-9).unwrap();
        for &(x, y) in &[(0.0f64, -30e-6), (25e-6, 10e-6), (-40e-6, -5e-6)] {
            let r = (x.powi(2) + (y - 25e-9f64).powi(2)).sqrt();
            let expected = MU0 * s.delta_i / (TAU * r);
            assert_relative_eq!(mag(delta_b(&s, [x, y]).unwrap()), expected, max_relative = 0.01);
        }
    }

    #[test]
    fn superposition_of_wire_and_image() {
        let s = reference();
        for &p in &[[0.0, -50e-9], [170e-9, 25e-9], [-400e-9, 300e-9], [1e-6, -0.5e-6]] {
            let total = delta_b(&s, p).unwrap();
            let w = wire_field(&s, p);
            let i = image_field(&s, p);
            assert_relative_eq!(total[0], w[0] + i[0], max_relative = 1e-12);
            assert_relative_eq!(total[1], w[1] + i[1], max_relative = 1e-12);
        }
    }

    #[test]
    fn g0_examples() {
        let s = reference();
        let p = [0.0, -50e-9];
        let g_free = g0_at(&s, p, &SpinSpecies::free_electron(), None).unwrap();
        assert_relative_eq!(g_free, 7.17e3, max_relative = 0.10);
        let g_er = g0_at(&s, p, &SpinSpecies::erbium_cawo4(), None).unwrap();
        assert_relative_eq!(g_er, 30.0e3, max_relative = 0.10);

        // B0 along the local field direction: no perpendicular component.
        let b = delta_b(&s, p).unwrap();
        let n = mag(b);
        let g = g0_at(&s, p, &SpinSpecies::erbium_cawo4(), Some([b[0] / n, b[1] / n, 0.0])).unwrap();
        assert!(g < 1e-9 * g_er);

        assert!(g0_at(&s, p, &SpinSpecies::erbium_cawo4(), Some([1.0, 1.0, 0.0])).is_err());
    }

    #[test]
    fn g0_invariant_under_current_gyro_rescaling() {
        let s = reference();
        let spin = SpinSpecies::erbium_cawo4();
        let g = g0_at(&s, [30e-9, -80e-9], &spin, None).unwrap();
        let c = 3.7;
        let s2 = CrossSection {
            delta_i: s.delta_i * c,
            ..s
        };
        let spin2 = SpinSpecies {
            gyro_ratio: spin.gyro_ratio / c,
            ..spin
        };
        assert_relative_eq!(
            g0_at(&s2, [30e-9, -80e-9], &spin2, None).unwrap(),
            g,
            max_relative = 1e-12
        );
    }

    #[test]
    fn species_gyro_ratio() {
        let e = SpinSpecies::free_electron();
        assert_relative_eq!(e.gyro_ratio, e.g_factor * 13.996e9, max_relative = 1e-3);
        assert!(SpinSpecies::new("x", -1.0, 0.0, [0.0, 0.0, 1.0]).is_err());
    }

    #[test]
    fn default_map_peak_and_symmetry() {
        let s = reference();
        let map = field_map(&s, &Window::default_for(&s), 5e-9).unwrap();
        assert_relative_eq!(map.b_max(), 794e-9, max_relative = 0.30);

        let nx = map.xs().len();
        for iy in 0..map.ys().len() {
            for ix in 0..nx {
                let a = map.get(ix, iy);
                let b = map.get(nx - 1 - ix, iy);
                assert_eq!(a.is_some(), b.is_some());
                if let (Some(a), Some(b)) = (a, b) {
                    let scale = mag(a).max(1e-30);
                    assert!((a[0] - b[0]).abs() < 1e-9 * scale);
                    assert!((a[1] + b[1]).abs() < 1e-9 * scale);
                }
            }
        }
        // Stored maximum equals the maximum over stored values.
        let m = map.stored().map(|(_, _, b)| mag(b)).fold(0.0, f64::max);
        assert_eq!(m, map.b_max());
    }

    #[test]
    fn map_excludes_guard_and_caches_location() {
        let s = reference();
        let map = field_map(&s, &Window::default_for(&s), 5e-9).unwrap();
        for (x, y, _) in map.stored() {
            assert!(!s.is_excluded(x, y));
        }
        let at = map.b_max_at().unwrap();
        assert!(at[0].abs() > 0.5 * s.width, "peak sits beside the wire edge: {at:?}");
    }

    #[test]
    fn grid_convergence() {
        let s = reference();
        let w = Window::default_for(&s);
        let coarse = field_map(&s, &w, 5e-9).unwrap();
        let fine = field_map(&s, &w, 2.5e-9).unwrap();
        assert!((fine.b_max() / coarse.b_max() - 1.0).abs() < 0.05);
        let v1 = mode_volume_star(&coarse, 7.5e9, 1e4).unwrap().v_star;
        let v2 = mode_volume_star(&fine, 7.5e9, 1e4).unwrap().v_star;
        assert!((v2 / v1 - 1.0).abs() < 0.10);
    }

    #[test]
    fn empty_window() {
        let s = reference();
        let w = Window {
            x_min: 1.2e-9,
            x_max: 1.3e-9,
            y_min: -1e-7,
            y_max: -0.9e-7,
        };
        assert!(matches!(field_map(&s, &w, 5e-9), Err(Error::EmptyWindow)));
        let w = Window {
            x_min: 1.0,
            x_max: -1.0,
            ..w
        };
        assert!(matches!(field_map(&s, &w, 5e-9), Err(Error::EmptyWindow)));
    }

    #[test]
    fn mode_volume_examples() {
        let s = reference();
        let map = field_map(&s, &Window::default_for(&s), 5e-9).unwrap();
        let m = mode_volume_star(&map, 7.5e9, 1e4).unwrap();
        assert_relative_eq!(m.v_star, 4.95e-18, max_relative = 0.5);
        assert_relative_eq!(m.v_star_over_lambda3, 7.75e-14, max_relative = 0.5);
        assert_relative_eq!(m.v_star_over_lambda3, m.v_star / m.lambda.powi(3), max_relative = 1e-14);

        let doubled = mode_metrics_from_peak(2.0 * m.b_max, 7.5e9, 1e4).unwrap();
        assert_relative_eq!(doubled.v_star, m.v_star / 4.0, max_relative = 1e-14);
        assert!(mode_metrics_from_peak(0.0, 7.5e9, 1e4).is_err());
    }

    #[test]
    fn purcell_examples() {
        let m = ModeMetrics {
            v_star: 0.0,
            lambda: 0.0,
            v_star_over_lambda3: 7.75e-14,
            b_max: 0.0,
            q: 1e4,
            f_p_max: 0.0,
        };
        assert_relative_eq!(purcell_factor(&m, 1e4, 1.0).unwrap(), 9.80e15, max_relative = 1e-3);
        let f = (4.07f64 / 9.80).sqrt();
        assert_relative_eq!(purcell_factor(&m, 1e4, f).unwrap(), 4.07e15, max_relative = 1e-3);
        assert_relative_eq!(
            purcell_factor(&m, 3e4, f).unwrap(),
            3.0 * purcell_factor(&m, 1e4, f).unwrap(),
            max_relative = 1e-14
        );
        assert!(purcell_factor(&m, 1e4, 1.5).is_err());
    }

    #[test]
    fn purcell_rate_examples() {
        let gp = purcell_rate(30.0e3, TAU * 750e3).unwrap();
        assert_relative_eq!(gp, 3.016e4, max_relative = 1e-3);
        assert_relative_eq!(1.0 / gp, 33.16e-6, max_relative = 1e-3);
        assert_relative_eq!(
            purcell_rate(60.0e3, TAU * 750e3).unwrap(),
            4.0 * gp,
            max_relative = 1e-14
        );
        assert_relative_eq!(purcell_rate(7.17e3, TAU * 750e3).unwrap(), 1.72e3, max_relative = 2e-3);
        assert!(purcell_rate(0.0, 1.0).is_err());
    }

    #[test]
    fn wire_only_map_has_higher_peak() {
        let s = reference();
        let w = Window::default_for(&s);
        let with_image = field_map(&s, &w, 5e-9).unwrap();
        let wire_only = field_map_with(&s, &w, 5e-9, FieldModel::WireOnly).unwrap();
        assert!(wire_only.b_max() > with_image.b_max());
    }
}
