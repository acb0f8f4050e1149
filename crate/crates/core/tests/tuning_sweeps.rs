use proptest::prelude::*;
use spinres::optimize::golden_section_budget;
use spinres::tuning::{
    alignment_search, fit_quadratic_tuning, hysteresis_metric, predict_detuning, FieldSweepRecord, SweepDirection,
};

fn ramp(f0: f64, a: f64, n: usize, direction: SweepDirection) -> Vec<FieldSweepRecord> {
    (0..n)
        .map(|k| {
            let b = 0.5 * k as f64 / (n - 1) as f64;
            FieldSweepRecord::new(b, f0 * (1.0 - a * b * b), direction)
        })
        .collect()
}

#[test]
fn sample_3c_like_detuning() {
    let fit = fit_quadratic_tuning(&ramp(7.48e9, 0.0652, 26, SweepDirection::RampUp)).unwrap();
    let d = predict_detuning(&fit, 0.5).unwrap();
    assert!((d / -122e6 - 1.0).abs() < 0.01, "{d}");
    let q = predict_detuning(&fit, 0.25).unwrap();
    assert!((q / -30.5e6 - 1.0).abs() < 0.01, "{q}");
}

#[test]
fn vortex_jump_flagged_once_at_its_field() {
    let up = ramp(7.48e9, 0.0652, 21, SweepDirection::RampUp);
    let mut down = ramp(7.48e9, 0.0652, 21, SweepDirection::RampDown);
    down.reverse();
    let mut up_jump = up;
    for r in up_jump.iter_mut().filter(|r| r.field_magnitude >= 0.2 - 1e-12) {
        r.f_r -= 2e6;
    }
    let report = hysteresis_metric(&up_jump, &down).unwrap();
    assert_eq!(report.vortex_events.len(), 1, "{:?}", report.vortex_events);
    let e = report.vortex_events[0];
    assert!((e.field - 0.2).abs() < 1e-12);
    assert_eq!(e.direction, SweepDirection::RampUp);
    assert!((e.step + 2e6).abs() < 0.1e6);
    assert!((report.max_difference - 2e6).abs() < 1.0);
}

#[test]
fn offset_grid_interpolates_down_sweep() {
    let up = ramp(7.5e9, 0.05, 21, SweepDirection::RampUp);
    let down: Vec<_> = (0..20)
        .map(|k| {
            let b = 0.0125 + 0.025 * k as f64;
            FieldSweepRecord::new(b, 7.5e9 * (1.0 - 0.05 * b * b) + 100e3, SweepDirection::RampDown)
        })
        .collect();
    let r = hysteresis_metric(&up, &down).unwrap();
    // Linear interpolation of a quadratic over spacing h errs by at most f0 a h^2 / 4.
    let interp = 7.5e9 * 0.05 * 0.025f64.powi(2) / 4.0 + 1.0;
    assert!((r.max_difference - 100e3).abs() < interp, "{}", r.max_difference);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn alignment_respects_window_and_budget(
        theta in -0.02f64..0.02,
        half_width in 0.03f64..0.5,
        tol in 1e-6f64..1e-3,
        c in 1e-4f64..0.1,
    ) {
        let mut calls = 0usize;
        let mut outside = false;
        let r = alignment_search(
            |x| {
                calls += 1;
                outside |= x.abs() > half_width;
                7.5e9 * (1.0 - c * (x - theta).sin().powi(2))
            },
            (-half_width, half_width),
            tol,
        ).unwrap();
        prop_assert!(!outside);
        prop_assert!(calls <= golden_section_budget(2.0 * half_width, tol));
        prop_assert!((r.x - theta).abs() <= tol);
    }

    #[test]
    fn detuning_even_and_quadratic(a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let fit = fit_quadratic_tuning(&ramp(7e9, a, 10, SweepDirection::RampUp)).unwrap();
        let d1 = predict_detuning(&fit, b).unwrap();
        let d2 = predict_detuning(&fit, 2.0 * b).unwrap();
        prop_assert!((d2 - 4.0 * d1).abs() <= 1e-9 * d2.abs().max(1.0));
    }
}
