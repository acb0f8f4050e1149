//! Magnetic-field dependence of the resonance: quadratic tuning law,
//! in-plane alignment and hysteresis between sweep directions.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{ensure_non_negative, Error, Result};
use crate::optimize::{golden_section_max, ScalarOptimum};

/// Jumps larger than this many robust standard deviations of the local
/// scatter count as vortex events.
pub const JUMP_THRESHOLD_SIGMA: f64 = 5.0;
/// Neighbouring differences used on each side for the local trend.
const JUMP_NEIGHBOURS: usize = 3;
/// Relative frequency resolution used as the scatter floor.
const SCATTER_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepDirection {
    RampUp,
    RampDown,
}

impl std::str::FromStr for SweepDirection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "up" | "ramp-up" | "ramp_up" => Ok(Self::RampUp),
            "down" | "ramp-down" | "ramp_down" => Ok(Self::RampDown),
            other => Err(Error::Domain(format!("unknown sweep direction '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldSweepRecord {
    /// |B| in tesla.
    pub field_magnitude: f64,
    /// In-plane field angle (rad).
    pub field_angle: Option<f64>,
    pub f_r: f64,
    pub q_i: Option<f64>,
    pub direction: SweepDirection,
}

impl FieldSweepRecord {
    pub fn new(field_magnitude: f64, f_r: f64, direction: SweepDirection) -> Self {
        Self {
            field_magnitude,
            field_angle: None,
            f_r,
            q_i: None,
            direction,
        }
    }

    pub fn validate(&self) -> Result<()> {
        ensure_non_negative("field_magnitude", self.field_magnitude)?;
        if !(self.f_r > 0.0 && self.f_r.is_finite()) {
            return Err(Error::Domain(format!("f_r must be positive, got {}", self.f_r)));
        }
        Ok(())
    }
}

/// Discrete drop (or rise) in `f_r` between consecutive points of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VortexEvent {
    /// Field of the first point after the jump.
    pub field: f64,
    pub direction: SweepDirection,
    /// Size of the jump in Hz relative to the local trend.
    pub step: f64,
    /// Change in Q_i across the jump, when Q_i is known.
    pub q_i_step: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadraticTuneFit {
    pub f_r0: f64,
    /// Relative-shift coefficient in 1/T^2.
    pub a_coeff: f64,
    /// RMS of `(f_model - f_r) / f_r0`.
    pub residual_rms: f64,
    /// Vortex jumps absorbed as baseline offsets.
    pub jumps: Vec<VortexEvent>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HysteresisReport {
    /// Largest |f_up - f_down| on the common field grid (Hz).
    pub max_difference: f64,
    /// Field where the largest difference occurs.
    pub at_field: f64,
    pub vortex_events: Vec<VortexEvent>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QiSummary {
    pub count: usize,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

/// Records of one direction in sweep order, with their indices in the input.
fn sweep_order(records: &[FieldSweepRecord], direction: SweepDirection) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..records.len())
        .filter(|&k| records[k].direction == direction)
        .collect();
    idx.sort_by(|&a, &b| {
        let (fa, fb) = (records[a].field_magnitude, records[b].field_magnitude);
        match direction {
            SweepDirection::RampUp => fa.total_cmp(&fb),
            SweepDirection::RampDown => fb.total_cmp(&fa),
        }
    });
    idx
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Positions `i` in `sweep` (jump between `sweep[i]` and `sweep[i + 1]`)
/// whose frequency step departs from the local trend by more than
/// [`JUMP_THRESHOLD_SIGMA`] robust standard deviations, with the excess
/// step in Hz.
fn jump_positions(records: &[FieldSweepRecord], sweep: &[usize]) -> Vec<(usize, f64)> {
    if sweep.len() < 6 {
        return Vec::new();
    }
    let b: Vec<f64> = sweep.iter().map(|&k| records[k].field_magnitude).collect();
    let f: Vec<f64> = sweep.iter().map(|&k| records[k].f_r).collect();
    let m = f.len() - 1;
    let diff: Vec<f64> = (0..m).map(|i| f[i + 1] - f[i]).collect();
    let db: Vec<f64> = (0..m).map(|i| b[i + 1] - b[i]).collect();
    let mid: Vec<f64> = (0..m).map(|i| 0.5 * (b[i + 1] + b[i])).collect();
    let scale = f.iter().map(|v| v.abs()).sum::<f64>() / f.len() as f64;
    let floor = SCATTER_FLOOR * scale;

    let mut flagged = vec![false; m];
    let mut out = Vec::new();
    loop {
        // Expected step from a line through neighbouring slopes df/dB.
        let residual: Vec<Option<f64>> = (0..m)
            .map(|i| {
                if flagged[i] {
                    return None;
                }
                let lo = i.saturating_sub(JUMP_NEIGHBOURS);
                let hi = (i + JUMP_NEIGHBOURS).min(m - 1);
                let pts: Vec<(f64, f64)> = (lo..=hi)
                    .filter(|&j| j != i && !flagged[j] && db[j] != 0.0)
                    .map(|j| (mid[j], diff[j] / db[j]))
                    .collect();
                let expected_slope = match pts.len() {
                    0 => return None,
                    1 => pts[0].1,
                    _ => {
                        let n = pts.len() as f64;
                        let xm = pts.iter().map(|p| p.0).sum::<f64>() / n;
                        let ym = pts.iter().map(|p| p.1).sum::<f64>() / n;
                        let sxx: f64 = pts.iter().map(|p| (p.0 - xm).powi(2)).sum();
                        let sxy: f64 = pts.iter().map(|p| (p.0 - xm) * (p.1 - ym)).sum();
                        let k = if sxx > 0.0 { sxy / sxx } else { 0.0 };
                        ym + k * (mid[i] - xm)
                    }
                };
                Some(diff[i] - expected_slope * db[i])
            })
            .collect();
        let mut abs: Vec<f64> = residual.iter().flatten().map(|r| r.abs()).collect();
        if abs.len() < 3 {
            break;
        }
        let sigma = (1.4826 * median(&mut abs)).max(floor);
        let worst = residual
            .iter()
            .enumerate()
            .filter_map(|(i, r)| r.map(|r| (i, r.abs())))
            .max_by(|a, b| a.1.total_cmp(&b.1));
        match worst {
            Some((i, r)) if r > JUMP_THRESHOLD_SIGMA * sigma => {
                flagged[i] = true;
                out.push((i, residual[i].unwrap_or(0.0)));
            }
            _ => break,
        }
    }
    out.sort_by_key(|&(i, _)| i);
    out
}

/// Vortex jumps in each sweep direction present in `records`.
pub fn detect_vortex_events(records: &[FieldSweepRecord]) -> Vec<VortexEvent> {
    let mut events = Vec::new();
    for direction in [SweepDirection::RampUp, SweepDirection::RampDown] {
        let sweep = sweep_order(records, direction);
        for (i, step) in jump_positions(records, &sweep) {
            let (before, after) = (&records[sweep[i]], &records[sweep[i + 1]]);
            events.push(VortexEvent {
                field: after.field_magnitude,
                direction,
                step,
                q_i_step: before.q_i.zip(after.q_i).map(|(a, b)| b - a),
            });
        }
    }
    events
}

/// Least-squares fit of `f_r(B) = f_r0 (1 - a B^2)`, with any detected
/// vortex jump absorbed as a constant offset for the rest of its sweep.
/// The coefficient is constrained to `a >= 0`.
pub fn fit_quadratic_tuning(records: &[FieldSweepRecord]) -> Result<QuadraticTuneFit> {
    for r in records {
        r.validate()?;
    }
    let mut fields: Vec<f64> = records.iter().map(|r| r.field_magnitude).collect();
    fields.sort_by(f64::total_cmp);
    fields.dedup();
    if fields.len() < 3 {
        return Err(Error::DegenerateData(format!(
            "need at least 3 distinct field magnitudes, got {}",
            fields.len()
        )));
    }

    // One step column per jump: 1 for the points of that sweep after it.
    let mut steps: Vec<Vec<f64>> = Vec::new();
    let mut jumps = Vec::new();
    for direction in [SweepDirection::RampUp, SweepDirection::RampDown] {
        let sweep = sweep_order(records, direction);
        for (i, step) in jump_positions(records, &sweep) {
            let mut col = vec![0.0; records.len()];
            for &k in &sweep[i + 1..] {
                col[k] = 1.0;
            }
            steps.push(col);
            let (before, after) = (&records[sweep[i]], &records[sweep[i + 1]]);
            jumps.push(VortexEvent {
                field: after.field_magnitude,
                direction,
                step,
                q_i_step: before.q_i.zip(after.q_i).map(|(a, b)| b - a),
            });
        }
    }

    let f_scale = records.iter().map(|r| r.f_r).sum::<f64>() / records.len() as f64;
    let y = DVector::from_iterator(records.len(), records.iter().map(|r| r.f_r / f_scale));
    let solve = |with_curvature: bool| -> Result<(Vec<f64>, f64)> {
        let ncols = 1 + usize::from(with_curvature) + steps.len();
        let a = DMatrix::from_fn(records.len(), ncols, |row, col| match (col, with_curvature) {
            (0, _) => 1.0,
            (1, true) => -records[row].field_magnitude.powi(2),
            (c, w) => steps[c - 1 - usize::from(w)][row],
        });
        let sol = a
            .clone()
            .svd(true, true)
            .solve(&y, 1e-14)
            .map_err(|e| Error::DegenerateData(e.to_string()))?;
        let res = &a * &sol - &y;
        Ok((sol.iter().copied().collect(), res.norm_squared()))
    };

    let (mut sol, mut ssr) = solve(true)?;
    if sol[1] < 0.0 {
        let (s, r) = solve(false)?;
        sol = std::iter::once(s[0])
            .chain(std::iter::once(0.0))
            .chain(s[1..].iter().copied())
            .collect();
        ssr = r;
    }
    let f_r0 = sol[0] * f_scale;
    if !(f_r0 > 0.0) {
        return Err(Error::DegenerateData(
            "fitted zero-field frequency is not positive".into(),
        ));
    }
    let a_coeff = (sol[1] / sol[0]).max(0.0);
    Ok(QuadraticTuneFit {
        f_r0,
        a_coeff,
        residual_rms: (ssr / records.len() as f64).sqrt() * f_scale / f_r0,
        jumps,
    })
}

/// Frequency shift `f_r(B) - f_r0 = -f_r0 a B^2` in Hz.
pub fn predict_detuning(fit: &QuadraticTuneFit, field: f64) -> Result<f64> {
    ensure_non_negative("field", field)?;
    Ok(-fit.f_r0 * fit.a_coeff * field * field)
}

/// Angle in `[window.0, window.1]` that maximizes `response`, found by
/// golden-section search to within `tolerance`. A maximum on the window
/// edge is reported as [`Error::NotBracketed`].
pub fn alignment_search<F>(response: F, window: (f64, f64), tolerance: f64) -> Result<ScalarOptimum>
where
    F: FnMut(f64) -> f64,
{
    golden_section_max(response, window.0, window.1, tolerance)
}

/// Sorted (field, f_r) pairs of one sweep, averaging repeated fields.
fn curve(records: &[FieldSweepRecord]) -> Vec<(f64, f64)> {
    let mut pts: Vec<(f64, f64)> = records.iter().map(|r| (r.field_magnitude, r.f_r)).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64, usize)> = Vec::new();
    for (b, f) in pts {
        match out.last_mut() {
            Some(last) if last.0 == b => {
                last.1 += f;
                last.2 += 1;
            }
            _ => out.push((b, f, 1)),
        }
    }
    out.into_iter().map(|(b, f, n)| (b, f / n as f64)).collect()
}

fn interpolate(curve: &[(f64, f64)], x: f64) -> f64 {
    let k = curve.partition_point(|p| p.0 < x);
    if k == 0 {
        return curve[0].1;
    }
    if k == curve.len() {
        return curve[k - 1].1;
    }
    let (x0, y0) = curve[k - 1];
    let (x1, y1) = curve[k];
    if x1 == x0 {
        y1
    } else {
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }
}

/// Largest difference between up and down sweeps over their common field
/// range, with vortex jumps flagged in either sweep.
pub fn hysteresis_metric(up: &[FieldSweepRecord], down: &[FieldSweepRecord]) -> Result<HysteresisReport> {
    for r in up.iter().chain(down) {
        r.validate()?;
    }
    if up.is_empty() || down.is_empty() {
        return Err(Error::NonOverlapping);
    }
    let cu = curve(up);
    let cd = curve(down);
    let lo = cu[0].0.max(cd[0].0);
    let hi = cu[cu.len() - 1].0.min(cd[cd.len() - 1].0);
    if lo > hi {
        return Err(Error::NonOverlapping);
    }
    let mut grid: Vec<f64> = cu
        .iter()
        .chain(&cd)
        .map(|p| p.0)
        .filter(|&b| (lo..=hi).contains(&b))
        .collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();

    let (mut max_difference, mut at_field) = (0.0, grid[0]);
    for &b in &grid {
        let d = (interpolate(&cu, b) - interpolate(&cd, b)).abs();
        if d > max_difference {
            max_difference = d;
            at_field = b;
        }
    }

    let with_direction = |rs: &[FieldSweepRecord], d: SweepDirection| -> Vec<FieldSweepRecord> {
        rs.iter().map(|r| FieldSweepRecord { direction: d, ..*r }).collect()
    };
    let mut all = with_direction(up, SweepDirection::RampUp);
    all.extend(with_direction(down, SweepDirection::RampDown));
    Ok(HysteresisReport {
        max_difference,
        at_field,
        vortex_events: detect_vortex_events(&all),
    })
}

/// Descriptive statistics of the Q_i values present in `records`.
pub fn q_i_summary(records: &[FieldSweepRecord]) -> Option<QiSummary> {
    let q: Vec<f64> = records.iter().filter_map(|r| r.q_i).collect();
    if q.is_empty() {
        return None;
    }
    Some(QiSummary {
        count: q.len(),
        min: q.iter().copied().fold(f64::INFINITY, f64::min),
        max: q.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        mean: q.iter().sum::<f64>() / q.len() as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    fn sweep(f0: f64, a: f64, n: usize, b_max: f64, direction: SweepDirection) -> Vec<FieldSweepRecord> {
        (0..n)
            .map(|k| {
                let b = b_max * k as f64 / (n - 1) as f64;
                FieldSweepRecord::new(b, f0 * (1.0 - a * b * b), direction)
            })
            .collect()
    }

    #[test]
    fn noiseless_fit_is_exact() {
        let recs = sweep(7.48e9, 0.0652, 21, 0.5, SweepDirection::RampUp);
        let fit = fit_quadratic_tuning(&recs).unwrap();
        assert!((fit.a_coeff / 0.0652 - 1.0).abs() < 1e-9);
        assert!((fit.f_r0 / 7.48e9 - 1.0).abs() < 1e-12);
        assert!(fit.residual_rms < 1e-12);
        assert!(fit.jumps.is_empty());
        let d = predict_detuning(&fit, 0.5).unwrap();
        assert!((d / 1e6 + 121.9).abs() < 0.1, "{d}");
    }

    #[test]
    fn flat_data_gives_zero_coefficient() {
        let recs = sweep(7.5e9, 0.0, 10, 0.5, SweepDirection::RampUp);
        let fit = fit_quadratic_tuning(&recs).unwrap();
        assert_eq!(fit.a_coeff, 0.0);
    }

    #[test]
    fn rising_frequency_is_clamped() {
        let recs = sweep(7.5e9, -0.01, 10, 0.5, SweepDirection::RampUp);
        let fit = fit_quadratic_tuning(&recs).unwrap();
        assert_eq!(fit.a_coeff, 0.0);
    }

    #[test]
    fn equal_fields_are_degenerate() {
        let recs: Vec<_> = (0..5)
            .map(|k| FieldSweepRecord::new(0.1, 7.5e9 + k as f64, SweepDirection::RampUp))
            .collect();
        assert!(matches!(fit_quadratic_tuning(&recs), Err(Error::DegenerateData(_))));
    }

    #[test]
    fn noisy_fit_within_five_percent() {
        let mut recs = sweep(7.48e9, 0.0652, 20, 0.5, SweepDirection::RampUp);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let noise = Normal::new(0.0, 50e3).unwrap();
        for r in &mut recs {
            r.f_r += noise.sample(&mut rng);
        }
        let fit = fit_quadratic_tuning(&recs).unwrap();
        assert!((fit.a_coeff / 0.0652 - 1.0).abs() < 0.05);
    }

    #[test]
    fn jump_is_absorbed_as_offset() {
        let mut recs = sweep(7.48e9, 0.0652, 21, 0.5, SweepDirection::RampUp);
        for r in recs.iter_mut().filter(|r| r.field_magnitude >= 0.2 - 1e-12) {
            r.f_r -= 2e6;
        }
        let fit = fit_quadratic_tuning(&recs).unwrap();
        assert_eq!(fit.jumps.len(), 1);
        assert!((fit.jumps[0].field - 0.2).abs() < 1e-12);
        assert!((fit.a_coeff / 0.0652 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn detuning_scaling() {
        let fit = QuadraticTuneFit {
            f_r0: 7.48e9,
            a_coeff: 0.0652,
            residual_rms: 0.0,
            jumps: vec![],
        };
        assert_eq!(predict_detuning(&fit, 0.0).unwrap(), 0.0);
        let q = predict_detuning(&fit, 0.25).unwrap();
        let h = predict_detuning(&fit, 0.5).unwrap();
        assert!((h / q - 4.0).abs() < 1e-12);
        assert!(predict_detuning(&fit, -0.1).is_err());
    }

    #[test]
    fn alignment_finds_offset_angle() {
        let theta = 3e-3;
        let tol = 1e-5;
        let mut calls = 0;
        let r = alignment_search(
            |x| {
                calls += 1;
                7.5e9 * (1.0 - 0.01 * (x - theta).sin().powi(2))
            },
            (-0.05, 0.05),
            tol,
        )
        .unwrap();
        assert!((r.x - theta).abs() <= tol);
        assert!(calls <= crate::optimize::golden_section_budget(0.1, tol));
    }

    #[test]
    fn hysteresis_examples() {
        let up = sweep(7.5e9, 0.05, 21, 0.5, SweepDirection::RampUp);
        let down = sweep(7.5e9, 0.05, 21, 0.5, SweepDirection::RampDown);
        let r = hysteresis_metric(&up, &down).unwrap();
        assert_eq!(r.max_difference, 0.0);
        assert!(r.vortex_events.is_empty());

        let shifted: Vec<_> = down
            .iter()
            .map(|r| FieldSweepRecord {
                f_r: r.f_r + 100e3,
                ..*r
            })
            .collect();
        let r = hysteresis_metric(&up, &shifted).unwrap();
        assert!((r.max_difference - 100e3).abs() < 1e-3);
    }

    #[test]
    fn disjoint_sweeps_fail() {
        let up: Vec<_> = sweep(7.5e9, 0.05, 5, 0.1, SweepDirection::RampUp);
        let down: Vec<_> = up
            .iter()
            .map(|r| FieldSweepRecord {
                field_magnitude: r.field_magnitude + 0.5,
                ..*r
            })
            .collect();
        assert!(matches!(hysteresis_metric(&up, &down), Err(Error::NonOverlapping)));
    }
}
