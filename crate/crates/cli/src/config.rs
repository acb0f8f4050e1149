//! Run configuration: a TOML file of unit-suffixed scalars, flattened to
//! dotted keys, plus `--set key=value` overrides.
//!
//! ```toml
//! [design]
//! wire_width = "300 nm"
//! f_r = "7.5 GHz"
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::error::CliError;
use crate::units::{parse_quantity, Unit};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Quantity(Unit),
    Count,
    Flag,
    Path,
}

pub struct KeySpec {
    pub key: &'static str,
    pub kind: Kind,
    /// Built-in value, written as it would appear in a config file.
    pub default: Option<&'static str>,
    pub help: &'static str,
}

const fn q(key: &'static str, unit: Unit, default: &'static str, help: &'static str) -> KeySpec {
    KeySpec {
        key,
        kind: Kind::Quantity(unit),
        default: Some(default),
        help,
    }
}

const fn n(key: &'static str, default: &'static str, help: &'static str) -> KeySpec {
    KeySpec {
        key,
        kind: Kind::Count,
        default: Some(default),
        help,
    }
}

use Unit::*;

pub const KEYS: &[KeySpec] = &[
    // design
    q("design.capacitor_diameter", Length, "825 um", "capacitor disk diameter"),
    q("design.wire_length", Length, "10 um", "nanowire length"),
    q("design.wire_width", Length, "300 nm", "nanowire width"),
    q(
        "design.film_thickness",
        Length,
        "50 nm",
        "superconducting film thickness",
    ),
    q("design.dielectric_thickness", Length, "500 nm", "dielectric thickness"),
    q(
        "design.epsilon_r",
        Dimensionless,
        "11.9",
        "dielectric relative permittivity",
    ),
    q(
        "design.sheet_kinetic_inductance",
        SheetInductance,
        "0.2 pH/sq",
        "kinetic inductance per square",
    ),
    q("design.f_r", Frequency, "7.5 GHz", "resonance frequency"),
    q("design.inductance", Inductance, "15.93 pH", "total nanowire inductance"),
    q(
        "design.q",
        Dimensionless,
        "1e4",
        "loaded quality factor for Purcell estimates",
    ),
    q(
        "design.line_impedance",
        Resistance,
        "50 Ohm",
        "feed-line impedance for galvanic coupling",
    ),
    q("design.spin_x", Length, "0 nm", "spin position across the wire"),
    q(
        "design.spin_y",
        Length,
        "-50 nm",
        "spin position below the wire (negative is substrate)",
    ),
    q("design.grid_spacing", Length, "5 nm", "field-map grid spacing"),
    q("design.guard", Length, "5 nm", "exclusion distance around conductors"),
    q("design.window_half_width", Length, "1 um", "field-map half width"),
    q(
        "design.window_depth",
        Length,
        "500 nm",
        "field-map depth into the substrate",
    ),
    // fit
    KeySpec {
        key: "fit.trace",
        kind: Kind::Path,
        default: None,
        help: "trace CSV (freq_hz,re,im)",
    },
    KeySpec {
        key: "fit.amplitude_slope",
        kind: Kind::Flag,
        default: Some("false"),
        help: "fit a linear background amplitude slope",
    },
    KeySpec {
        key: "fit.power_at_sample",
        kind: Kind::Quantity(PowerDbm),
        default: None,
        help: "drive power at the sample, enables the photon-number estimate",
    },
    // tune
    KeySpec {
        key: "tune.sweep",
        kind: Kind::Path,
        default: None,
        help: "sweep CSV (b_tesla,angle_rad,f_r_hz,q_i,direction)",
    },
    q(
        "tune.predict_field",
        Field,
        "0.5 T",
        "field at which to report the predicted detuning",
    ),
    // simulate
    q(
        "simulate.f_r",
        Frequency,
        "7.5 GHz",
        "resonance frequency of the synthetic trace",
    ),
    q("simulate.q_i", Dimensionless, "2e4", "internal quality factor"),
    q("simulate.q_c", Dimensionless, "1e4", "coupling quality factor"),
    n("simulate.points", "401", "trace points"),
    q("simulate.linewidths", Dimensionless, "10", "trace span in linewidths"),
    q("simulate.noise", Dimensionless, "0.01", "noise per quadrature"),
    q("simulate.amplitude", Dimensionless, "1", "background amplitude"),
    q("simulate.phase_offset", Angle, "1 rad", "background phase offset"),
    q("simulate.delay", Time, "50 ns", "electrical delay"),
    q(
        "simulate.tune_f0",
        Frequency,
        "7.48 GHz",
        "zero-field frequency of the synthetic sweep",
    ),
    q(
        "simulate.tune_a",
        InverseFieldSquared,
        "0.0652 /T^2",
        "quadratic tuning coefficient",
    ),
    n("simulate.tune_points", "21", "points per sweep direction"),
    q("simulate.tune_b_max", Field, "0.5 T", "maximum field"),
    q(
        "simulate.tune_noise",
        Frequency,
        "50 kHz",
        "frequency noise of the sweep",
    ),
    q(
        "simulate.jump_field",
        Field,
        "0.2 T",
        "field of the injected vortex jump on the up sweep",
    ),
    q(
        "simulate.jump_size",
        Frequency,
        "0 Hz",
        "size of the injected jump (0 disables it)",
    ),
    // protocol-count
    q(
        "count.t1",
        Time,
        "0.8 ms",
        "spin lifetime of the reference detector scenario",
    ),
    q(
        "count.g0",
        Frequency,
        "30 kHz",
        "coupling g0/2pi for the Purcell-enhanced scenario",
    ),
    q("count.linewidth", Frequency, "750 kHz", "resonator linewidth kappa/2pi"),
    q(
        "count.gamma",
        Rate,
        "0 /s",
        "non-radiative relaxation rate of the Purcell-enhanced spin",
    ),
    q("count.eta", Dimensionless, "0.3", "detection efficiency"),
    q("count.alpha", Rate, "100 /s", "dark-count rate"),
    q("count.snr", Dimensionless, "2", "target SNR"),
    n("count.mc_trials", "10000", "Monte Carlo trials"),
    q("count.t1_min", Time, "1 us", "shortest T1 of the regime map"),
    q("count.t1_max", Time, "100 ms", "longest T1 of the regime map"),
    n("count.t1_points", "41", "T1 values of the regime map"),
    // protocol-dispersive
    q("dispersive.g0", Frequency, "30 kHz", "coupling g0/2pi"),
    q("dispersive.f_r", Frequency, "7.5 GHz", "resonance frequency"),
    q("dispersive.q", Dimensionless, "1e4", "loaded quality factor"),
    q("dispersive.kc_fraction", Dimensionless, "0.5", "kappa_c / kappa"),
    q("dispersive.eta", Dimensionless, "0.3", "measurement efficiency"),
    q("dispersive.gamma", Rate, "1 /s", "non-radiative spin relaxation rate"),
    q(
        "dispersive.n_crit_safety",
        Dimensionless,
        "2",
        "drive limited to n_crit / this",
    ),
    q(
        "dispersive.delta_min",
        Frequency,
        "2 MHz",
        "smallest detuning Delta/2pi",
    ),
    q(
        "dispersive.delta_max",
        Frequency,
        "200 MHz",
        "largest detuning Delta/2pi",
    ),
    n("dispersive.delta_points", "21", "log-spaced detunings"),
    q(
        "dispersive.saturation",
        PowerDbm,
        "-100 dBm",
        "amplifier saturation power",
    ),
    n("dispersive.mc_trials", "10000", "Monte Carlo trials"),
    q(
        "dispersive.mc_delta",
        Frequency,
        "10 MHz",
        "detuning Delta/2pi for the Monte Carlo check",
    ),
    q(
        "dispersive.mc_tau",
        Time,
        "1 ms",
        "measurement time for the Monte Carlo check",
    ),
];

pub fn spec(key: &str) -> Option<&'static KeySpec> {
    KEYS.iter().find(|k| k.key == key)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Number(f64),
    Count(u64),
    Flag(bool),
    Path(PathBuf),
}

#[derive(Debug, Clone, Default)]
pub struct Config {
    values: BTreeMap<&'static str, Value>,
}

fn parse_text(spec: &KeySpec, text: &str) -> Result<Value, CliError> {
    let err = |m: String| CliError::Config(format!("{}: {m}", spec.key));
    Ok(match spec.kind {
        Kind::Quantity(unit) => Value::Number(parse_quantity(text, unit).map_err(err)?),
        Kind::Count => Value::Count(
            text.trim()
                .parse()
                .map_err(|_| err(format!("'{text}' is not a non-negative integer")))?,
        ),
        Kind::Flag => Value::Flag(match text.trim() {
            "true" => true,
            "false" => false,
            other => return Err(err(format!("'{other}' is not true or false"))),
        }),
        Kind::Path => Value::Path(PathBuf::from(text)),
    })
}

fn parse_toml(spec: &KeySpec, value: &toml::Value) -> Result<Value, CliError> {
    let err = |m: &str| CliError::Config(format!("{}: {m}", spec.key));
    match (spec.kind, value) {
        (_, toml::Value::String(s)) => parse_text(spec, s),
        (Kind::Quantity(Unit::Dimensionless), toml::Value::Float(f)) => Ok(Value::Number(*f)),
        (Kind::Quantity(Unit::Dimensionless), toml::Value::Integer(i)) => Ok(Value::Number(*i as f64)),
        (Kind::Quantity(unit), toml::Value::Float(_) | toml::Value::Integer(_)) => {
            Err(err(&format!("needs a unit, write it as a string such as \"1 {unit}\"")))
        }
        (Kind::Count, toml::Value::Integer(i)) if *i >= 0 => Ok(Value::Count(*i as u64)),
        (Kind::Flag, toml::Value::Boolean(b)) => Ok(Value::Flag(*b)),
        _ => Err(err("has the wrong type")),
    }
}

fn flatten(prefix: &str, table: &toml::Table, out: &mut Vec<(String, toml::Value)>) {
    for (k, v) in table {
        let key = if prefix.is_empty() {
            k.clone()
        } else {
            format!("{prefix}.{k}")
        };
        match v {
            toml::Value::Table(t) => flatten(&key, t, out),
            other => out.push((key, other.clone())),
        }
    }
}

impl Config {
    /// Built-in defaults only.
    pub fn defaults() -> Self {
        let mut values = BTreeMap::new();
        for spec in KEYS {
            if let Some(d) = spec.default {
                values.insert(spec.key, parse_text(spec, d).expect("built-in default parses"));
            }
        }
        Self { values }
    }

    /// Defaults, then the file at `path` (if any), then `overrides`.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self, CliError> {
        let mut cfg = Self::defaults();
        if let Some(path) = path {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            cfg.merge_toml(&text)?;
        }
        for item in overrides {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("--set expects key=value, got '{item}'")))?;
            cfg.set(key.trim(), value.trim())?;
        }
        Ok(cfg)
    }

    pub fn merge_toml(&mut self, text: &str) -> Result<(), CliError> {
        let table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| CliError::Config(e.to_string()))?;
        let mut flat = Vec::new();
        flatten("", &table, &mut flat);
        for (key, value) in flat {
            let spec = spec(&key).ok_or(CliError::UnknownKey(key.clone()))?;
            self.values.insert(spec.key, parse_toml(spec, &value)?);
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, text: &str) -> Result<(), CliError> {
        let spec = spec(key).ok_or_else(|| CliError::UnknownKey(key.to_owned()))?;
        let text = text.trim_matches('"');
        self.values.insert(spec.key, parse_text(spec, text)?);
        Ok(())
    }

    fn get(&self, key: &str) -> Result<&Value, CliError> {
        self.values
            .get(key)
            .ok_or_else(|| CliError::Config(format!("{key} is required")))
    }

    /// SI value of a quantity key.
    pub fn number(&self, key: &str) -> Result<f64, CliError> {
        match self.get(key)? {
            Value::Number(v) => Ok(*v),
            _ => Err(CliError::Config(format!("{key} is not a quantity"))),
        }
    }

    /// SI value of a quantity key that has no default.
    pub fn number_opt(&self, key: &str) -> Result<Option<f64>, CliError> {
        match self.values.get(key) {
            None => Ok(None),
            Some(Value::Number(v)) => Ok(Some(*v)),
            Some(_) => Err(CliError::Config(format!("{key} is not a quantity"))),
        }
    }

    pub fn count(&self, key: &str) -> Result<u64, CliError> {
        match self.get(key)? {
            Value::Count(v) => Ok(*v),
            _ => Err(CliError::Config(format!("{key} is not a count"))),
        }
    }

    pub fn flag(&self, key: &str) -> Result<bool, CliError> {
        match self.get(key)? {
            Value::Flag(v) => Ok(*v),
            _ => Err(CliError::Config(format!("{key} is not a flag"))),
        }
    }

    pub fn path(&self, key: &str) -> Result<&Path, CliError> {
        match self.get(key)? {
            Value::Path(p) => Ok(p),
            _ => Err(CliError::Config(format!("{key} is not a path"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_parse() {
        let c = Config::defaults();
        assert_eq!(c.number("design.wire_width").unwrap(), 300e-9);
        assert_eq!(c.count("simulate.points").unwrap(), 401);
        assert!(!c.flag("fit.amplitude_slope").unwrap());
        assert!(c.path("fit.trace").is_err());
    }

    #[test]
    fn toml_and_overrides() {
        let mut c = Config::defaults();
        c.merge_toml("[design]\nwire_width = \"4 um\"\nepsilon_r = 9\n[count]\nmc_trials = 2000\n")
            .unwrap();
        assert_eq!(c.number("design.wire_width").unwrap(), 4e-6);
        assert_eq!(c.number("design.epsilon_r").unwrap(), 9.0);
        assert_eq!(c.count("count.mc_trials").unwrap(), 2000);
        c.set("count.alpha", "10 /s").unwrap();
        assert_eq!(c.number("count.alpha").unwrap(), 10.0);
    }

    #[test]
    fn rejects_unknown_and_unitless() {
        let mut c = Config::defaults();
        assert!(matches!(c.set("design.colour", "red"), Err(CliError::UnknownKey(_))));
        assert!(matches!(
            c.merge_toml("[design]\nf_r = 7.5e9\n"),
            Err(CliError::Config(_))
        ));
        assert!(matches!(c.merge_toml("[nope]\nx = 1\n"), Err(CliError::UnknownKey(_))));
        assert!(c.set("design.f_r", "7.5").is_err());
    }
}
