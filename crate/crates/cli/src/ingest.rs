//! Strict CSV readers for reflection traces and field sweeps.
//!
//! Malformed rows are rejected, never repaired. Row numbers in errors
//! count data rows from 1 (the header is row 0).

use std::path::Path;

use num_complex::Complex64;
use spinres::tuning::{FieldSweepRecord, SweepDirection};

use crate::error::CliError;

pub const TRACE_HEADER: &[&str] = &["freq_hz", "re", "im"];
pub const SWEEP_HEADER: &[&str] = &["b_tesla", "angle_rad", "f_r_hz", "q_i", "direction"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Schema {
    Trace,
    Sweep,
}

impl Schema {
    pub fn header(self) -> &'static [&'static str] {
        match self {
            Schema::Trace => TRACE_HEADER,
            Schema::Sweep => SWEEP_HEADER,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub freq: f64,
    pub s11: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Records {
    Trace(Vec<TraceRecord>),
    Sweep(Vec<FieldSweepRecord>),
}

impl Records {
    pub fn len(&self) -> usize {
        match self {
            Records::Trace(r) => r.len(),
            Records::Sweep(r) => r.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

struct Ctx<'a> {
    path: &'a Path,
}

impl Ctx<'_> {
    fn err(&self, row: usize, column: &str, message: impl Into<String>) -> CliError {
        CliError::Schema {
            path: self.path.to_owned(),
            row,
            column: column.to_owned(),
            message: message.into(),
        }
    }

    fn number(&self, row: usize, column: &str, text: &str) -> Result<f64, CliError> {
        let v: f64 = text
            .parse()
            .map_err(|_| self.err(row, column, format!("'{text}' is not a number")))?;
        if !v.is_finite() {
            return Err(self.err(row, column, format!("'{text}' is not finite")));
        }
        Ok(v)
    }

    fn optional(&self, row: usize, column: &str, text: &str) -> Result<Option<f64>, CliError> {
        if text.is_empty() {
            Ok(None)
        } else {
            self.number(row, column, text).map(Some)
        }
    }
}

/// Read `path` against `schema`.
pub fn ingest_csv(path: &Path, schema: Schema) -> Result<Records, CliError> {
    let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let ctx = Ctx { path };

    let header = reader
        .headers()
        .map_err(|e| ctx.err(0, "", format!("unreadable header: {e}")))?
        .clone();
    let expected = schema.header();
    for (k, want) in expected.iter().enumerate() {
        match header.get(k) {
            Some(got) if got == *want => {}
            Some(got) => {
                return Err(ctx.err(0, got, format!("header '{got}' should be '{want}'")));
            }
            None => return Err(ctx.err(0, want, format!("missing header '{want}'"))),
        }
    }
    if header.len() > expected.len() {
        let extra = &header[expected.len()];
        return Err(ctx.err(0, extra, format!("unexpected header '{extra}'")));
    }

    let mut traces = Vec::new();
    let mut sweeps = Vec::new();
    for (k, record) in reader.records().enumerate() {
        let row = k + 1;
        let record = record.map_err(|e| ctx.err(row, "", e.to_string()))?;
        if record.len() != expected.len() {
            return Err(ctx.err(
                row,
                "",
                format!("expected {} fields, found {}", expected.len(), record.len()),
            ));
        }
        match schema {
            Schema::Trace => {
                let freq = ctx.number(row, "freq_hz", &record[0])?;
                if freq <= 0.0 {
                    return Err(ctx.err(row, "freq_hz", "frequency must be positive"));
                }
                if let Some(prev) = traces.last().map(|t: &TraceRecord| t.freq) {
                    if freq <= prev {
                        return Err(ctx.err(row, "freq_hz", "frequencies must increase strictly"));
                    }
                }
                let re = ctx.number(row, "re", &record[1])?;
                let im = ctx.number(row, "im", &record[2])?;
                traces.push(TraceRecord {
                    freq,
                    s11: Complex64::new(re, im),
                });
            }
            Schema::Sweep => {
                let b = ctx.number(row, "b_tesla", &record[0])?;
                if b < 0.0 {
                    return Err(ctx.err(row, "b_tesla", "field magnitude must be non-negative"));
                }
                let angle = ctx.optional(row, "angle_rad", &record[1])?;
                let f_r = ctx.number(row, "f_r_hz", &record[2])?;
                if f_r <= 0.0 {
                    return Err(ctx.err(row, "f_r_hz", "frequency must be positive"));
                }
                let q_i = ctx.optional(row, "q_i", &record[3])?;
                if q_i.is_some_and(|q| q <= 0.0) {
                    return Err(ctx.err(row, "q_i", "Q_i must be positive"));
                }
                let direction: SweepDirection = record[4]
                    .parse()
                    .map_err(|_| ctx.err(row, "direction", format!("'{}' is not up or down", &record[4])))?;
                sweeps.push(FieldSweepRecord {
                    field_magnitude: b,
                    field_angle: angle,
                    f_r,
                    q_i,
                    direction,
                });
            }
        }
    }
    Ok(match schema {
        Schema::Trace => Records::Trace(traces),
        Schema::Sweep => Records::Sweep(sweeps),
    })
}

pub fn ingest_trace(path: &Path) -> Result<Vec<TraceRecord>, CliError> {
    match ingest_csv(path, Schema::Trace)? {
        Records::Trace(t) => Ok(t),
        Records::Sweep(_) => unreachable!("trace schema yields trace records"),
    }
}

pub fn ingest_sweep(path: &Path) -> Result<Vec<FieldSweepRecord>, CliError> {
    match ingest_csv(path, Schema::Sweep)? {
        Records::Sweep(s) => Ok(s),
        Records::Trace(_) => unreachable!("sweep schema yields sweep records"),
    }
}
