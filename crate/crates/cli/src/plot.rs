//! Static SVG plots rendered from result tables.
//!
//! Output is a pure function of the `PlotSpec` and the table: fixed layout,
//! fixed number formatting, no timestamps.

use std::fmt::Write as _;

use crate::error::CliError;
use crate::output::Table;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 84.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 56.0;
const RIGHT_LINE: f64 = 24.0;
const RIGHT_HEAT: f64 = 110.0;
/// Heatmaps are decimated to at most this many cells per axis.
const MAX_CELLS: usize = 160;

// Red and green are kept free for guide lines.
const PALETTE: &[&str] = &[
    "#1f77b4", "#ff7f0e", "#9467bd", "#8c564b", "#17becf", "#e377c2", "#7f7f7f",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    Heatmap,
    Line,
    LogLog,
}

#[derive(Debug, Clone)]
pub struct Axis {
    pub label: String,
    /// Physical unit of the column values (SI, unprefixed).
    pub unit: String,
    /// Only consulted for [`PlotKind::Line`]; log-log plots are log on both.
    pub log: bool,
}

impl Axis {
    pub fn linear(label: &str, unit: &str) -> Self {
        Self {
            label: label.into(),
            unit: unit.into(),
            log: false,
        }
    }

    pub fn log(label: &str, unit: &str) -> Self {
        Self {
            log: true,
            ..Self::linear(label, unit)
        }
    }
}

#[derive(Debug, Clone)]
pub struct Series {
    pub x: String,
    pub y: String,
    pub label: String,
    /// Omitted silently when it has no finite points.
    pub optional: bool,
    pub style: Style,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Style {
    Solid,
    Dashed,
    Points,
}

impl Style {
    fn dash(self) -> &'static str {
        match self {
            Style::Dashed => r#" stroke-dasharray="6 4""#,
            _ => "",
        }
    }
}

impl Series {
    pub fn new(x: &str, y: &str, label: &str) -> Self {
        Self {
            x: x.into(),
            y: y.into(),
            label: label.into(),
            optional: false,
            style: Style::Solid,
        }
    }

    pub fn optional(mut self) -> Self {
        self.optional = true;
        self
    }

    pub fn dashed(mut self) -> Self {
        self.style = Style::Dashed;
        self
    }

    pub fn points(mut self) -> Self {
        self.style = Style::Points;
        self
    }
}

/// Straight guide line `y = y0 (x / x0)^slope` on log-log axes.
#[derive(Debug, Clone)]
pub struct Guide {
    pub slope: f64,
    pub through: (f64, f64),
    pub label: String,
    pub color: String,
}

#[derive(Debug, Clone)]
pub struct Marker {
    pub at: (f64, f64),
    pub label: String,
}

#[derive(Debug, Clone)]
pub struct PlotSpec {
    pub name: String,
    pub kind: PlotKind,
    pub title: String,
    pub x_axis: Axis,
    pub y_axis: Axis,
    /// For heatmaps, the first series gives the x and y coordinate columns.
    pub series: Vec<Series>,
    /// Heatmap colour column and its axis.
    pub color: Option<(String, Axis)>,
    pub guides: Vec<Guide>,
    pub markers: Vec<Marker>,
}

impl PlotSpec {
    pub fn new(name: &str, kind: PlotKind, title: &str, x_axis: Axis, y_axis: Axis) -> Self {
        Self {
            name: name.into(),
            kind,
            title: title.into(),
            x_axis,
            y_axis,
            series: Vec::new(),
            color: None,
            guides: Vec::new(),
            markers: Vec::new(),
        }
    }

    pub fn series(mut self, s: Series) -> Self {
        self.series.push(s);
        self
    }

    pub fn color(mut self, column: &str, axis: Axis) -> Self {
        self.color = Some((column.into(), axis));
        self
    }

    pub fn guide(mut self, slope: f64, through: (f64, f64), label: &str, color: &str) -> Self {
        self.guides.push(Guide {
            slope,
            through,
            label: label.into(),
            color: color.into(),
        });
        self
    }

    pub fn marker(mut self, at: (f64, f64), label: &str) -> Self {
        self.markers.push(Marker {
            at,
            label: label.into(),
        });
        self
    }

    fn x_log(&self) -> bool {
        self.kind == PlotKind::LogLog || (self.kind == PlotKind::Line && self.x_axis.log)
    }

    fn y_log(&self) -> bool {
        self.kind == PlotKind::LogLog || (self.kind == PlotKind::Line && self.y_axis.log)
    }

    fn fail(&self, message: impl Into<String>) -> CliError {
        CliError::Plot {
            plot: self.name.clone(),
            message: message.into(),
        }
    }
}

/// Format with at most 4 significant digits, trailing zeros removed.
fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if (1e-3..1e5).contains(&a) {
        let s = format!("{v:.4}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        s.to_owned()
    } else {
        let s = format!("{v:.2e}");
        let (m, e) = s.split_once('e').unwrap_or((&s, "0"));
        let m = m.trim_end_matches('0').trim_end_matches('.');
        format!("{m}e{e}")
    }
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// SI prefix for displaying a linear axis: `(factor, prefixed unit)`.
fn display_unit(unit: &str, max_abs: f64) -> (f64, String) {
    if matches!(unit, "1" | "dB" | "dBm" | "rad" | "%") || unit.starts_with('/') || max_abs.is_nan() || max_abs <= 0.0 {
        return (1.0, unit.to_owned());
    }
    const P: &[(f64, &str)] = &[
        (1e12, "T"),
        (1e9, "G"),
        (1e6, "M"),
        (1e3, "k"),
        (1.0, ""),
        (1e-3, "m"),
        (1e-6, "µ"),
        (1e-9, "n"),
        (1e-12, "p"),
    ];
    for &(f, p) in P {
        if max_abs >= f {
            return (f, format!("{p}{unit}"));
        }
    }
    (1e-12, format!("p{unit}"))
}

struct Scale {
    lo: f64,
    hi: f64,
    log: bool,
    p0: f64,
    p1: f64,
}

impl Scale {
    fn new(lo: f64, hi: f64, log: bool, p0: f64, p1: f64) -> Self {
        let (mut lo, mut hi) = if log { (lo.log10(), hi.log10()) } else { (lo, hi) };
        if hi - lo <= 0.0 {
            let pad = if lo == 0.0 { 1.0 } else { 0.05 * lo.abs() };
            lo -= pad;
            hi += pad;
        }
        Self { lo, hi, log, p0, p1 }
    }

    fn map(&self, v: f64) -> f64 {
        let v = if self.log { v.log10() } else { v };
        self.p0 + (v - self.lo) / (self.hi - self.lo) * (self.p1 - self.p0)
    }

    fn contains(&self, v: f64) -> bool {
        let v = if self.log { v.log10() } else { v };
        v >= self.lo - 1e-9 * (self.hi - self.lo) && v <= self.hi + 1e-9 * (self.hi - self.lo)
    }

    /// Tick positions in data units.
    fn ticks(&self) -> Vec<f64> {
        if self.log {
            let (a, b) = (self.lo.ceil() as i32, self.hi.floor() as i32);
            let step = ((b - a) / 8 + 1).max(1);
            return (a..=b).step_by(step as usize).map(|k| 10f64.powi(k)).collect();
        }
        let span = self.hi - self.lo;
        let raw = span / 5.0;
        let mag = 10f64.powf(raw.log10().floor());
        let step = [1.0, 2.0, 5.0, 10.0]
            .iter()
            .map(|m| m * mag)
            .find(|s| span / s <= 7.0)
            .unwrap_or(10.0 * mag);
        let first = (self.lo / step).ceil() as i64;
        let last = (self.hi / step).floor() as i64;
        (first..=last).map(|k| k as f64 * step).collect()
    }
}

/// Data range padded for display; log axes drop non-positive values.
fn range(values: impl Iterator<Item = f64>, log: bool, pad: bool) -> Option<(f64, f64)> {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in values.filter(|v| v.is_finite() && (!log || *v > 0.0)) {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if lo > hi {
        return None;
    }
    if pad {
        if log {
            let f = (hi / lo).powf(0.04).max(1.05);
            return Some((lo / f, hi * f));
        }
        let p = 0.04 * (hi - lo);
        return Some((lo - p, hi + p));
    }
    Some((lo, hi))
}

/// Five-stop perceptually ordered colour ramp (dark blue to yellow).
fn ramp(t: f64) -> String {
    const STOPS: [[f64; 3]; 5] = [
        [68.0, 1.0, 84.0],
        [59.0, 82.0, 139.0],
        [33.0, 145.0, 140.0],
        [94.0, 201.0, 98.0],
        [253.0, 231.0, 37.0],
    ];
    let t = t.clamp(0.0, 1.0) * 4.0;
    let k = (t.floor() as usize).min(3);
    let f = t - k as f64;
    let c: Vec<u8> = (0..3)
        .map(|i| (STOPS[k][i] + f * (STOPS[k + 1][i] - STOPS[k][i])).round() as u8)
        .collect();
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

struct Frame<'a> {
    svg: String,
    spec: &'a PlotSpec,
    x: Scale,
    y: Scale,
    x_disp: (f64, String),
    y_disp: (f64, String),
}

impl<'a> Frame<'a> {
    fn new(spec: &'a PlotSpec, xr: (f64, f64), yr: (f64, f64), right: f64) -> Self {
        let (x_log, y_log) = (spec.x_log(), spec.y_log());
        let x = Scale::new(xr.0, xr.1, x_log, LEFT, WIDTH - right);
        let y = Scale::new(yr.0, yr.1, y_log, HEIGHT - BOTTOM, TOP);
        let x_disp = if x_log {
            (1.0, spec.x_axis.unit.clone())
        } else {
            display_unit(&spec.x_axis.unit, xr.0.abs().max(xr.1.abs()))
        };
        let y_disp = if y_log {
            (1.0, spec.y_axis.unit.clone())
        } else {
            display_unit(&spec.y_axis.unit, yr.0.abs().max(yr.1.abs()))
        };
        let mut svg = String::new();
        let _ = writeln!(
            svg,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(svg, r##"<rect width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>"##);
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
            WIDTH / 2.0,
            esc(&spec.title)
        );
        Self {
            svg,
            spec,
            x,
            y,
            x_disp,
            y_disp,
        }
    }

    fn clip_id(&self) -> String {
        format!(
            "clip-{}",
            self.spec.name.replace(|c: char| !c.is_ascii_alphanumeric(), "-")
        )
    }

    fn open_clip(&mut self) {
        let id = self.clip_id();
        let (x0, x1, y0, y1) = (self.x.p0, self.x.p1, self.y.p1, self.y.p0);
        let _ = writeln!(
            self.svg,
            r#"<clipPath id="{id}"><rect x="{x0:.2}" y="{y0:.2}" width="{:.2}" height="{:.2}"/></clipPath>"#,
            x1 - x0,
            y1 - y0
        );
        let _ = writeln!(self.svg, r#"<g clip-path="url(#{id})">"#);
    }

    fn close_clip(&mut self) {
        self.svg.push_str("</g>\n");
    }

    fn axes(&mut self) {
        let (x0, x1, y0, y1) = (self.x.p0, self.x.p1, self.y.p1, self.y.p0);
        let _ = writeln!(
            self.svg,
            r##"<rect x="{x0:.2}" y="{y0:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="#000000"/>"##,
            x1 - x0,
            y1 - y0
        );
        for t in self.x.ticks() {
            let px = self.x.map(t);
            let label = fmt_tick(t / self.x_disp.0);
            let _ = writeln!(
                self.svg,
                r##"<line x1="{px:.2}" y1="{y1:.2}" x2="{px:.2}" y2="{:.2}" stroke="#000000"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">{label}</text>"##,
                y1 - 5.0,
                y1 + 16.0
            );
        }
        for t in self.y.ticks() {
            let py = self.y.map(t);
            let label = fmt_tick(t / self.y_disp.0);
            let _ = writeln!(
                self.svg,
                r##"<line x1="{x0:.2}" y1="{py:.2}" x2="{:.2}" y2="{py:.2}" stroke="#000000"/><text x="{:.2}" y="{:.2}" text-anchor="end">{label}</text>"##,
                x0 + 5.0,
                x0 - 6.0,
                py + 4.0
            );
        }
        let xl = format!("{} ({})", self.spec.x_axis.label, self.x_disp.1);
        let yl = format!("{} ({})", self.spec.y_axis.label, self.y_disp.1);
        let _ = writeln!(
            self.svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            0.5 * (x0 + x1),
            HEIGHT - 16.0,
            esc(&xl)
        );
        let cy = 0.5 * (y0 + y1);
        let _ = writeln!(
            self.svg,
            r#"<text x="18" y="{cy:.2}" text-anchor="middle" transform="rotate(-90 18 {cy:.2})">{}</text>"#,
            esc(&yl)
        );
    }

    fn guides_and_markers(&mut self) {
        let spec = self.spec;
        if !spec.guides.is_empty() {
            self.open_clip();
            for g in &spec.guides {
                let (gx0, gy0) = g.through;
                let at = |x: f64| gy0 * (x / gx0).powf(g.slope);
                let (xa, xb) = (10f64.powf(self.x.lo), 10f64.powf(self.x.hi));
                let _ = writeln!(
                    self.svg,
                    r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{}" stroke-width="1.5" stroke-dasharray="6 4"/>"#,
                    self.x.map(xa),
                    self.y.map(at(xa)),
                    self.x.map(xb),
                    self.y.map(at(xb)),
                    g.color
                );
            }
            self.close_clip();
        }
        for m in &spec.markers {
            if !(self.x.contains(m.at.0) && self.y.contains(m.at.1)) {
                continue;
            }
            let (px, py) = (self.x.map(m.at.0), self.y.map(m.at.1));
            let pts: Vec<String> = (0..10)
                .map(|k| {
                    let r = if k % 2 == 0 { 8.0 } else { 3.5 };
                    let a = std::f64::consts::PI * (k as f64 / 5.0 - 0.5);
                    format!("{:.2},{:.2}", px + r * a.cos(), py + r * a.sin())
                })
                .collect();
            let _ = writeln!(
                self.svg,
                r##"<polygon points="{}" fill="#000000"/><text x="{:.2}" y="{:.2}">{}</text>"##,
                pts.join(" "),
                px + 10.0,
                py - 6.0,
                esc(&m.label)
            );
        }
    }

    /// Legend in whichever corner covers the fewest drawn points.
    fn legend(&mut self, entries: &[(String, String, Style)], drawn: &[(f64, f64)]) {
        if entries.is_empty() {
            return;
        }
        let longest = entries.iter().map(|e| e.0.chars().count()).max().unwrap_or(0) as f64;
        let (w, h) = (40.0 + 6.6 * longest, 8.0 + 16.0 * entries.len() as f64);
        let (x0, x1, y0, y1) = (self.x.p0 + 6.0, self.x.p1 - 6.0, self.y.p1 + 6.0, self.y.p0 - 6.0);
        let corners = [(x0, y0), (x1 - w, y0), (x0, y1 - h), (x1 - w, y1 - h)];
        let covered = |&(cx, cy): &(f64, f64)| {
            drawn
                .iter()
                .filter(|&&(px, py)| px >= cx && px <= cx + w && py >= cy && py <= cy + h)
                .count()
        };
        let mut best = corners[0];
        let mut fewest = covered(&best);
        for c in &corners[1..] {
            let n = covered(c);
            if n < fewest {
                best = *c;
                fewest = n;
            }
        }
        let (bx, by) = best;
        let _ = writeln!(
            self.svg,
            r##"<rect x="{bx:.2}" y="{by:.2}" width="{w:.2}" height="{h:.2}" fill="#ffffff" fill-opacity="0.85" stroke="#cccccc"/>"##
        );
        let mut y = by + 16.0;
        let x = bx + 6.0;
        for (label, color, style) in entries {
            let _ = match style {
                Style::Points => writeln!(
                    self.svg,
                    r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#,
                    x + 11.0,
                    y - 4.0
                ),
                _ => writeln!(
                    self.svg,
                    r#"<line x1="{x:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}" stroke-width="2"{}/>"#,
                    y - 4.0,
                    x + 22.0,
                    y - 4.0,
                    style.dash()
                ),
            };
            let _ = writeln!(
                self.svg,
                r#"<text x="{:.2}" y="{y:.2}">{}</text>"#,
                x + 28.0,
                esc(label)
            );
            y += 16.0;
        }
    }

    fn finish(mut self) -> String {
        self.svg.push_str("</svg>\n");
        self.svg
    }
}

fn check_units(spec: &PlotSpec) -> Result<(), CliError> {
    for (name, axis) in [("x", &spec.x_axis), ("y", &spec.y_axis)] {
        if axis.unit.trim().is_empty() {
            return Err(spec.fail(format!("{name} axis has no unit")));
        }
    }
    if let Some((_, axis)) = &spec.color {
        if axis.unit.trim().is_empty() {
            return Err(spec.fail("colour scale has no unit"));
        }
    }
    Ok(())
}

fn column(spec: &PlotSpec, table: &Table, name: &str) -> Result<Vec<Option<f64>>, CliError> {
    table
        .column(name)
        .ok_or_else(|| spec.fail(format!("series column '{name}' is not in the table")))
}

/// Render `spec` from `table` as a self-contained SVG document.
pub fn emit_plot(spec: &PlotSpec, table: &Table) -> Result<String, CliError> {
    check_units(spec)?;
    if spec.series.is_empty() {
        return Err(spec.fail("no series"));
    }
    match spec.kind {
        PlotKind::Heatmap => heatmap(spec, table),
        PlotKind::Line | PlotKind::LogLog => lines(spec, table),
    }
}

fn lines(spec: &PlotSpec, table: &Table) -> Result<String, CliError> {
    let (x_log, y_log) = (spec.x_log(), spec.y_log());
    let mut data = Vec::new();
    for (k, s) in spec.series.iter().enumerate() {
        let xs = column(spec, table, &s.x)?;
        let ys = match table.column(&s.y) {
            Some(c) => c,
            None if s.optional => continue,
            None => return Err(spec.fail(format!("series column '{}' is not in the table", s.y))),
        };
        let pts: Vec<Option<(f64, f64)>> = xs
            .iter()
            .zip(&ys)
            .map(|(x, y)| match (x, y) {
                (Some(x), Some(y)) if (!x_log || *x > 0.0) && (!y_log || *y > 0.0) => Some((*x, *y)),
                _ => None,
            })
            .collect();
        if pts.iter().all(Option::is_none) {
            if s.optional {
                continue;
            }
            return Err(spec.fail(format!("series '{}' has no plottable points", s.label)));
        }
        data.push((k, s, pts));
    }
    if data.is_empty() {
        return Err(spec.fail("every series is empty"));
    }
    let all = || data.iter().flat_map(|(_, _, p)| p.iter().flatten());
    let xr = range(all().map(|p| p.0), x_log, false).expect("non-empty");
    let yr = range(
        all().map(|p| p.1).chain(spec.markers.iter().map(|m| m.at.1)),
        y_log,
        true,
    )
    .expect("non-empty");
    let mut f = Frame::new(spec, xr, yr, RIGHT_LINE);
    f.open_clip();
    let mut legend = Vec::new();
    let mut drawn = Vec::new();
    for (k, s, pts) in &data {
        let color = PALETTE[k % PALETTE.len()];
        // Missing cells are skipped; the line joins the remaining points.
        let px: Vec<(f64, f64)> = pts.iter().flatten().map(|&(x, y)| (f.x.map(x), f.y.map(y))).collect();
        if s.style == Style::Points || px.len() == 1 {
            for (x, y) in &px {
                let _ = writeln!(f.svg, r#"<circle cx="{x:.2}" cy="{y:.2}" r="2.5" fill="{color}"/>"#);
            }
        } else {
            let coords: Vec<String> = px.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
            let _ = writeln!(
                f.svg,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"{}/>"#,
                coords.join(" "),
                s.style.dash()
            );
        }
        drawn.extend(px);
        legend.push((s.label.clone(), color.to_owned(), s.style));
    }
    f.close_clip();
    f.guides_and_markers();
    f.axes();
    for g in &spec.guides {
        legend.push((g.label.clone(), g.color.clone(), Style::Dashed));
    }
    f.legend(&legend, &drawn);
    Ok(f.finish())
}

fn heatmap(spec: &PlotSpec, table: &Table) -> Result<String, CliError> {
    let (cname, caxis) = spec
        .color
        .as_ref()
        .ok_or_else(|| spec.fail("heatmap needs a colour column"))?;
    let s = &spec.series[0];
    let xs = column(spec, table, &s.x)?;
    let ys = column(spec, table, &s.y)?;
    let zs = column(spec, table, cname)?;
    let cells: Vec<(f64, f64, f64)> = xs
        .iter()
        .zip(&ys)
        .zip(&zs)
        .filter_map(|((x, y), z)| Some(((*x)?, (*y)?, (*z)?)))
        .collect();
    if cells.is_empty() {
        return Err(spec.fail(format!("series '{}' has no plottable points", s.label)));
    }
    let uniq = |v: Vec<f64>| {
        let mut v = v;
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    };
    let gx = uniq(cells.iter().map(|c| c.0).collect());
    let gy = uniq(cells.iter().map(|c| c.1).collect());
    let stride_x = gx.len().div_ceil(MAX_CELLS).max(1);
    let stride_y = gy.len().div_ceil(MAX_CELLS).max(1);
    let keep_x: Vec<f64> = gx.iter().step_by(stride_x).copied().collect();
    let keep_y: Vec<f64> = gy.iter().step_by(stride_y).copied().collect();
    let cell_w = |g: &[f64]| if g.len() > 1 { g[1] - g[0] } else { 1.0 };
    let (dx, dy) = (cell_w(&keep_x), cell_w(&keep_y));
    let xr = (keep_x[0] - 0.5 * dx, keep_x[keep_x.len() - 1] + 0.5 * dx);
    let yr = (keep_y[0] - 0.5 * dy, keep_y[keep_y.len() - 1] + 0.5 * dy);
    let zr = range(cells.iter().map(|c| c.2), caxis.log, false).expect("non-empty");
    let zscale = Scale::new(zr.0, zr.1, caxis.log, 0.0, 1.0);

    let mut f = Frame::new(spec, xr, yr, RIGHT_HEAT);
    f.open_clip();
    f.svg.push_str("<g shape-rendering=\"crispEdges\">\n");
    let in_grid = |g: &[f64], v: f64| g.binary_search_by(|p| p.total_cmp(&v)).is_ok();
    for &(x, y, z) in &cells {
        if !(in_grid(&keep_x, x) && in_grid(&keep_y, y)) || (caxis.log && z <= 0.0) {
            continue;
        }
        let (px0, px1) = (f.x.map(x - 0.5 * dx), f.x.map(x + 0.5 * dx));
        let (py0, py1) = (f.y.map(y + 0.5 * dy), f.y.map(y - 0.5 * dy));
        let _ = writeln!(
            f.svg,
            r#"<rect x="{px0:.2}" y="{py0:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
            px1 - px0 + 0.3,
            py1 - py0 + 0.3,
            ramp(zscale.map(z))
        );
    }
    f.svg.push_str("</g>\n");
    f.close_clip();
    f.guides_and_markers();
    f.axes();

    // Colour bar.
    let (bx, bw) = (WIDTH - RIGHT_HEAT + 18.0, 14.0);
    let (top, bottom) = (f.y.p1, f.y.p0);
    let steps = 64;
    for k in 0..steps {
        let t0 = k as f64 / steps as f64;
        let h = (bottom - top) / steps as f64;
        let _ = writeln!(
            f.svg,
            r#"<rect x="{bx:.2}" y="{:.2}" width="{bw:.2}" height="{:.2}" fill="{}" shape-rendering="crispEdges"/>"#,
            bottom - (k + 1) as f64 * h,
            h + 0.3,
            ramp(t0 + 0.5 / steps as f64)
        );
    }
    let cdisp = if caxis.log {
        (1.0, caxis.unit.clone())
    } else {
        display_unit(&caxis.unit, zr.0.abs().max(zr.1.abs()))
    };
    let cbar = Scale::new(zr.0, zr.1, caxis.log, bottom, top);
    for t in cbar.ticks() {
        let py = cbar.map(t);
        let _ = writeln!(
            f.svg,
            r##"<line x1="{:.2}" y1="{py:.2}" x2="{:.2}" y2="{py:.2}" stroke="#000000"/><text x="{:.2}" y="{:.2}">{}</text>"##,
            bx + bw,
            bx + bw + 4.0,
            bx + bw + 6.0,
            py + 4.0,
            fmt_tick(t / cdisp.0)
        );
    }
    let cx = WIDTH - 12.0;
    let cy = 0.5 * (top + bottom);
    let _ = writeln!(
        f.svg,
        r#"<text x="{cx:.2}" y="{cy:.2}" text-anchor="middle" transform="rotate(-90 {cx:.2} {cy:.2})">{}</text>"#,
        esc(&format!("{} ({})", caxis.label, cdisp.1))
    );
    Ok(f.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::output::{Cell, Table};

    fn table() -> Table {
        let mut t = Table::new(&["t1_s", "tau_s", "empty_s"]);
        for k in 0..10 {
            let x = 1e-5 * 2f64.powi(k);
            t.push(vec![x.into(), (3.0 * x).into(), Cell::Empty]);
        }
        t
    }

    fn loglog() -> PlotSpec {
        PlotSpec::new("pc", PlotKind::LogLog, "t", Axis::log("T1", "s"), Axis::log("tau", "s"))
            .series(Series::new("t1_s", "tau_s", "data"))
    }

    #[test]
    fn deterministic_and_self_contained() {
        let a = emit_plot(&loglog(), &table()).unwrap();
        let b = emit_plot(&loglog(), &table()).unwrap();
        assert_eq!(a, b);
        assert!(a.starts_with("<svg") && a.ends_with("</svg>\n"));
        assert!(!a.contains("href"));
    }

    #[test]
    fn optional_empty_series_is_omitted() {
        let spec = loglog()
            .series(Series::new("t1_s", "empty_s", "nothing").optional())
            .series(Series::new("t1_s", "absent_s", "absent").optional());
        let svg = emit_plot(&spec, &table()).unwrap();
        assert!(!svg.contains("nothing"));
    }

    #[test]
    fn missing_series_errors() {
        let spec = loglog().series(Series::new("t1_s", "absent_s", "absent"));
        let err = emit_plot(&spec, &table()).unwrap_err();
        assert_eq!(err.code(), "missing-series");
        let spec = loglog().series(Series::new("t1_s", "empty_s", "nothing"));
        assert!(emit_plot(&spec, &table()).is_err());
        let mut spec = loglog();
        spec.series.clear();
        assert!(emit_plot(&spec, &table()).is_err());
    }

    #[test]
    fn units_required() {
        let spec = PlotSpec::new("u", PlotKind::Line, "t", Axis::linear("x", ""), Axis::linear("y", "s"))
            .series(Series::new("t1_s", "tau_s", "data"));
        assert!(emit_plot(&spec, &table()).is_err());
    }

    #[test]
    fn guides_have_requested_slopes() {
        let spec =
            loglog()
                .guide(1.0, (1e-4, 1e-3), "slope 1", "#00aa00")
                .guide(2.0, (1e-4, 1e-3), "slope 2", "#aa0000");
        let svg = emit_plot(&spec, &table()).unwrap();
        // Pixel slope of each guide line equals the data slope times the
        // ratio of pixels per decade on the two axes.
        let frame_x = (LEFT, WIDTH - RIGHT_LINE);
        let lines: Vec<&str> = svg
            .lines()
            .filter(|l| l.contains("stroke-dasharray") && l.starts_with("<line x1"))
            .collect();
        assert!(lines.len() >= 2);
        let grab = |l: &str, key: &str| -> f64 {
            let s = &l[l.find(&format!("{key}=\"")).unwrap() + key.len() + 2..];
            s[..s.find('"').unwrap()].parse().unwrap()
        };
        let slopes: Vec<f64> = lines[..2]
            .iter()
            .map(|l| -(grab(l, "y2") - grab(l, "y1")) / (grab(l, "x2") - grab(l, "x1")))
            .collect();
        assert!(frame_x.1 > frame_x.0);
        assert!((slopes[1] / slopes[0] - 2.0).abs() < 1e-2, "{slopes:?}");
    }

    #[test]
    fn heatmap_renders_colour_bar() {
        let mut t = Table::new(&["x_m", "y_m", "b_t"]);
        for i in 0..5 {
            for j in 0..4 {
                t.push(vec![
                    (i as f64 * 1e-8).into(),
                    (j as f64 * 1e-8).into(),
                    ((i + j) as f64 * 1e-7).into(),
                ]);
            }
        }
        let spec = PlotSpec::new(
            "h",
            PlotKind::Heatmap,
            "map",
            Axis::linear("x", "m"),
            Axis::linear("y", "m"),
        )
        .series(Series::new("x_m", "y_m", "grid"))
        .color("b_t", Axis::linear("|dB|", "T"));
        let svg = emit_plot(&spec, &t).unwrap();
        assert!(svg.contains("(nm)"));
        assert!(svg.contains("crispEdges"));
        assert!(svg.contains("(nT)"));
        assert!(svg.matches("<rect").count() > 20 + 64);
    }

    #[test]
    fn tick_format() {
        assert_eq!(fmt_tick(0.5), "0.5");
        assert_eq!(fmt_tick(100.0), "100");
        assert_eq!(fmt_tick(1e-6), "1e-6");
        assert_eq!(fmt_tick(2.5e7), "2.5e7");
    }
}
