//! Result documents and tables.
//!
//! Every number in `results.json` is an object `{"value": .., "unit": ..}`.
//! Keys are sorted (serde_json's default map is a BTreeMap) so identical
//! runs produce identical bytes.

use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use crate::error::CliError;
use crate::units::Unit;

fn number(v: f64) -> Value {
    if v.is_nan() {
        Value::Null
    } else if v == f64::INFINITY {
        json!("inf")
    } else if v == f64::NEG_INFINITY {
        json!("-inf")
    } else {
        json!(v)
    }
}

/// A JSON object whose numeric leaves carry units.
#[derive(Debug, Default, Clone)]
pub struct Section(Map<String, Value>);

impl Section {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn quantity(&mut self, key: &str, value: f64, unit: Unit) -> &mut Self {
        self.0
            .insert(key.into(), json!({ "value": number(value), "unit": unit.symbol() }));
        self
    }

    /// Quantity in a unit outside [`Unit`], e.g. `dB`.
    pub fn quantity_in(&mut self, key: &str, value: f64, unit: &str) -> &mut Self {
        self.0
            .insert(key.into(), json!({ "value": number(value), "unit": unit }));
        self
    }

    pub fn count(&mut self, key: &str, value: u64) -> &mut Self {
        self.0.insert(key.into(), json!({ "value": value, "unit": "1" }));
        self
    }

    pub fn text(&mut self, key: &str, value: impl Into<String>) -> &mut Self {
        self.0.insert(key.into(), Value::String(value.into()));
        self
    }

    pub fn flag(&mut self, key: &str, value: bool) -> &mut Self {
        self.0.insert(key.into(), Value::Bool(value));
        self
    }

    pub fn section(&mut self, key: &str, section: Section) -> &mut Self {
        self.0.insert(key.into(), Value::Object(section.0));
        self
    }

    pub fn list(&mut self, key: &str, items: Vec<Section>) -> &mut Self {
        self.0.insert(
            key.into(),
            Value::Array(items.into_iter().map(|s| Value::Object(s.0)).collect()),
        );
        self
    }

    pub fn into_value(self) -> Value {
        Value::Object(self.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Num)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

/// Shortest round-trip representation, switching to exponent form for
/// very large or small magnitudes.
pub fn format_number(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let a = v.abs();
    if a == 0.0 || (1e-4..1e7).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

/// Column-oriented table with unit-suffixed headers such as `freq_hz`.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Numeric view of a column; `None` if the column does not exist.
    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(
            self.rows
                .iter()
                .map(|r| match r[k] {
                    Cell::Num(v) if v.is_finite() => Some(v),
                    _ => None,
                })
                .collect(),
        )
    }

    pub fn to_csv(&self) -> Result<Vec<u8>, csv::Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|c| match c {
                Cell::Num(v) => format_number(*v),
                Cell::Text(t) => t.clone(),
                Cell::Empty => String::new(),
            }))?;
        }
        w.into_inner().map_err(|e| csv::Error::from(e.into_error()))
    }
}

/// Output directory collecting the artifacts of one run.
pub struct Artifacts {
    dir: PathBuf,
    written: Vec<String>,
}

impl Artifacts {
    pub fn create(dir: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(Self {
            dir: dir.to_owned(),
            written: Vec::new(),
        })
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        let path = self.dir.join(name);
        std::fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))?;
        self.written.push(name.to_owned());
        Ok(())
    }

    pub fn table(&mut self, name: &str, table: &Table) -> Result<(), CliError> {
        let bytes = table
            .to_csv()
            .map_err(|e| CliError::io(self.dir.join(name), std::io::Error::other(e.to_string())))?;
        self.write(name, &bytes)
    }

    /// Write `results.json`, listing the other artifacts under `artifacts`.
    pub fn results(&mut self, mut doc: Section) -> Result<(), CliError> {
        let mut names = self.written.clone();
        names.sort();
        doc.0.insert("artifacts".into(), json!(names));
        let mut text = serde_json::to_string_pretty(&doc.into_value()).expect("JSON values serialize");
        text.push('\n');
        self.write("results.json", text.as_bytes())
    }
}
