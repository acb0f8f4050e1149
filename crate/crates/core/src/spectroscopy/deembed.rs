use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use super::fit::{seed_from_locus, BackgroundTerms, S11Residuals};
use super::{wrap_phase, ComplexTrace, DeembedParams};
use crate::error::{Error, Result};
use crate::lsq::minimize;

/// Fraction of the trace at each end treated as off-resonant.
const EDGE_FRACTION: f64 = 0.1;
/// Spans narrower than this many linewidths do not constrain the background.
const MIN_SPAN_LINEWIDTHS: f64 = 5.0;
const MAX_ITERATIONS: usize = 300;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DeembedOptions {
    /// Also fit a linear amplitude slope across the trace.
    pub fit_amplitude_slope: bool,
    /// Refine the off-resonant estimate with a joint background and
    /// resonance fit.
    pub refine: bool,
}

impl Default for DeembedOptions {
    fn default() -> Self {
        Self {
            fit_amplitude_slope: false,
            refine: true,
        }
    }
}

/// Remove attenuation, phase offset and electrical delay from a measured
/// trace. Returns the corrected trace and the background that was divided
/// out.
pub fn deembed(trace: &ComplexTrace) -> Result<(ComplexTrace, DeembedParams)> {
    deembed_with(trace, DeembedOptions::default())
}

pub fn deembed_with(trace: &ComplexTrace, options: DeembedOptions) -> Result<(ComplexTrace, DeembedParams)> {
    let f = trace.frequencies();
    let s = trace.s11();
    let n = f.len();
    let f_c = trace.center_frequency();
    let edge = ((EDGE_FRACTION * n as f64).round() as usize).max(2);

    let phase = unwrapped_phase(s);
    let delay0 = edge_delay(f, &phase, edge) / TAU;

    let rotated: Vec<Complex64> = f
        .iter()
        .zip(s)
        .map(|(&fk, &sk)| sk * Complex64::from_polar(1.0, -TAU * delay0 * (fk - f_c)))
        .collect();
    let edges = rotated[..edge].iter().chain(&rotated[n - edge..]);
    let mean: Complex64 = edges.clone().sum::<Complex64>() / (2 * edge) as f64;
    let amp0 = edges.map(|z| z.norm()).sum::<f64>() / (2 * edge) as f64;
    if !(amp0 > 0.0) {
        return Err(Error::InvalidTrace("trace has zero off-resonant amplitude".into()));
    }
    let phi_c0 = mean.arg();

    let rough = Background {
        amplitude: amp0,
        phi_c: phi_c0,
        delay: delay0,
        slope: 0.0,
        f_c,
    };
    let corrected = rough.divide(trace)?;

    let fitted = if options.refine && has_resonance(corrected.s11(), edge) {
        refine(trace, &corrected, rough, options.fit_amplitude_slope)?
    } else {
        rough
    };
    let params = fitted.to_params(options.fit_amplitude_slope);
    Ok((fitted.divide(trace)?, params))
}

#[derive(Debug, Clone, Copy)]
struct Background {
    amplitude: f64,
    /// Phase at the trace centre.
    phi_c: f64,
    delay: f64,
    slope: f64,
    f_c: f64,
}

impl Background {
    fn at(&self, f: f64) -> Complex64 {
        let u = f - self.f_c;
        Complex64::from_polar(
            self.amplitude * (1.0 + self.slope * u),
            self.phi_c + TAU * self.delay * u,
        )
    }

    fn divide(&self, trace: &ComplexTrace) -> Result<ComplexTrace> {
        let s = trace
            .frequencies()
            .iter()
            .zip(trace.s11())
            .map(|(&f, &z)| z / self.at(f))
            .collect();
        ComplexTrace::new(trace.frequencies().to_vec(), s, trace.power_at_sample())
    }

    fn to_params(self, with_slope: bool) -> DeembedParams {
        DeembedParams {
            amplitude: self.amplitude,
            phase_offset: wrap_phase(self.phi_c - TAU * self.delay * self.f_c),
            electrical_delay: self.delay,
            amplitude_slope: with_slope.then_some(self.slope),
        }
    }
}

fn unwrapped_phase(s: &[Complex64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(s.len());
    let mut offset = 0.0;
    let mut prev = s[0].arg();
    out.push(prev);
    for z in &s[1..] {
        let a = z.arg();
        let d = a - prev;
        if d > PI {
            offset -= TAU;
        } else if d < -PI {
            offset += TAU;
        }
        prev = a;
        out.push(a + offset);
    }
    out
}

/// Phase slope (rad/Hz) shared by the two trace ends, each end keeping its
/// own intercept so the resonance's phase step does not bias the slope.
fn edge_delay(f: &[f64], phase: &[f64], edge: usize) -> f64 {
    let n = f.len();
    let mut num = 0.0;
    let mut den = 0.0;
    for range in [0..edge, n - edge..n] {
        let m = range.len() as f64;
        let fm = f[range.clone()].iter().sum::<f64>() / m;
        let pm = phase[range.clone()].iter().sum::<f64>() / m;
        for k in range {
            num += (f[k] - fm) * (phase[k] - pm);
            den += (f[k] - fm).powi(2);
        }
    }
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

/// True when the corrected trace departs from unity well beyond the
/// point-to-point scatter seen in its ends.
fn has_resonance(s: &[Complex64], edge: usize) -> bool {
    let n = s.len();
    let steps: Vec<f64> = s[..edge]
        .windows(2)
        .chain(s[n - edge..].windows(2))
        .map(|w| (w[1] - w[0]).norm_sqr())
        .collect();
    let scatter = (steps.iter().sum::<f64>() / (2.0 * steps.len() as f64)).sqrt();
    let deviation = s.iter().map(|z| (z - 1.0).norm()).fold(0.0, f64::max);
    deviation > 10.0 * scatter + 1e-9
}

fn refine(trace: &ComplexTrace, corrected: &ComplexTrace, rough: Background, with_slope: bool) -> Result<Background> {
    let seed = seed_from_locus(corrected)?;
    let span = trace.span();
    if span < MIN_SPAN_LINEWIDTHS * seed.linewidth() {
        return Err(Error::InsufficientSpan(format!(
            "trace covers {:.2} linewidths, need at least {MIN_SPAN_LINEWIDTHS}",
            span / seed.linewidth()
        )));
    }
    let terms = BackgroundTerms {
        f_center: rough.f_c,
        delay0: rough.delay,
        delay_scale: 1.0 / (TAU * span),
        span,
        with_slope,
    };
    let model = S11Residuals {
        freqs: trace.frequencies(),
        data: trace.s11(),
        f0: seed.f_r,
        f_scale: seed.linewidth(),
        background: Some(terms),
    };
    let mut p0 = vec![
        0.0,
        seed.q_i.ln(),
        seed.q_c.ln(),
        rough.amplitude.ln(),
        rough.phi_c,
        0.0,
    ];
    if with_slope {
        p0.push(0.0);
    }
    let out = minimize(&model, &p0, MAX_ITERATIONS);
    if !out.converged || !out.params.iter().all(|v| v.is_finite()) {
        return Err(Error::FitFailed {
            best_residual: (out.ssr / trace.len() as f64).sqrt(),
        });
    }
    let p = &out.params;
    Ok(Background {
        amplitude: p[3].exp(),
        phi_c: p[4],
        delay: terms.delay0 + p[5] * terms.delay_scale,
        slope: if with_slope { p[6] / span } else { 0.0 },
        f_c: rough.f_c,
    })
}
