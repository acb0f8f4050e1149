//! Unit-suffixed scalars such as `7.5 GHz`, `300nm` or `100 /s`.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Unit {
    Length,
    Frequency,
    Inductance,
    SheetInductance,
    Current,
    Resistance,
    Field,
    Time,
    Rate,
    Power,
    PowerDbm,
    Temperature,
    Angle,
    InverseFieldSquared,
    Volume,
    AngularRate,
    PerHertz,
    Dimensionless,
}

impl Unit {
    pub fn symbol(self) -> &'static str {
        match self {
            Unit::Length => "m",
            Unit::Frequency => "Hz",
            Unit::Inductance => "H",
            Unit::SheetInductance => "H/sq",
            Unit::Current => "A",
            Unit::Resistance => "Ohm",
            Unit::Field => "T",
            Unit::Time => "s",
            Unit::Rate => "/s",
            Unit::Power => "W",
            Unit::PowerDbm => "dBm",
            Unit::Temperature => "K",
            Unit::Angle => "rad",
            Unit::InverseFieldSquared => "/T^2",
            Unit::Volume => "m^3",
            Unit::AngularRate => "rad/s",
            Unit::PerHertz => "/Hz",
            Unit::Dimensionless => "1",
        }
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

// Decimal exponents, so "300 nm" parses to the f64 nearest 300e-9 rather
// than 300.0 * 1e-9.
const PREFIXES: &[(&str, i32)] = &[
    ("f", -15),
    ("p", -12),
    ("n", -9),
    ("u", -6),
    ("µ", -6),
    ("m", -3),
    ("k", 3),
    ("M", 6),
    ("G", 9),
    ("T", 12),
];

fn prefix_exponent(p: &str) -> Option<i32> {
    if p.is_empty() {
        return Some(0);
    }
    PREFIXES.iter().find(|(s, _)| *s == p).map(|&(_, e)| e)
}

/// Split `"7.5 GHz"` into `("7.5", "GHz")`.
fn split_number(text: &str) -> Option<(&str, &str)> {
    let end = text
        .char_indices()
        .find(|&(i, c)| {
            let exponent_sign = (c == '+' || c == '-') && i > 0 && matches!(text.as_bytes()[i - 1], b'e' | b'E');
            !(c.is_ascii_digit()
                || c == '.'
                || c == 'e'
                || c == 'E'
                || exponent_sign
                || (i == 0 && (c == '+' || c == '-')))
        })
        .map_or(text.len(), |(i, _)| i);
    // Back off a trailing exponent marker that belongs to nothing.
    let mut number = &text[..end];
    while number.ends_with(['e', 'E']) {
        number = &number[..number.len() - 1];
    }
    number.parse::<f64>().ok()?;
    Some((number, text[number.len()..].trim()))
}

/// `number * 10^shift`, rounded once.
fn scale(number: &str, shift: i32) -> f64 {
    let (mantissa, exponent) = match number.find(['e', 'E']) {
        Some(k) => (&number[..k], number[k + 1..].parse::<i32>().unwrap_or(0)),
        None => (number, 0),
    };
    format!("{mantissa}e{}", exponent.saturating_add(shift))
        .parse()
        .unwrap_or(f64::NAN)
}

/// Parse `text` as a quantity in `unit`, returning the SI value.
///
/// SI prefixes are accepted on every unit except `dBm` and the
/// dimensionless unit; for inverse units the prefix follows the slash
/// (`100 /ms`).
pub fn parse_quantity(text: &str, unit: Unit) -> Result<f64, String> {
    let text = text.trim();
    let (number, suffix) = split_number(text).ok_or_else(|| format!("'{text}' does not start with a number"))?;
    let bad = || {
        if suffix.is_empty() && unit != Unit::Dimensionless {
            format!("'{text}' is missing its unit (expected {unit})")
        } else {
            format!("'{text}' has unit '{suffix}', expected {unit}")
        }
    };
    let shift = match unit {
        Unit::Dimensionless => {
            if suffix.is_empty() {
                0
            } else {
                return Err(format!("'{text}' should be a plain number"));
            }
        }
        Unit::PowerDbm => {
            if suffix == "dBm" {
                0
            } else {
                return Err(bad());
            }
        }
        Unit::Rate | Unit::InverseFieldSquared => {
            let (base, power) = if unit == Unit::Rate { ("s", 1) } else { ("T^2", 2) };
            let inner = suffix
                .strip_prefix('/')
                .and_then(|s| s.strip_suffix(base))
                .ok_or_else(bad)?;
            -power * prefix_exponent(inner).ok_or_else(bad)?
        }
        _ => {
            let prefix = suffix.strip_suffix(unit.symbol()).ok_or_else(bad)?;
            prefix_exponent(prefix).ok_or_else(bad)?
        }
    };
    let value = scale(number, shift);
    if !value.is_finite() {
        return Err(format!("'{text}' is not finite"));
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * b.abs().max(1e-300)
    }

    #[test]
    fn prefixed_values() {
        assert!(close(parse_quantity("7.5 GHz", Unit::Frequency).unwrap(), 7.5e9));
        assert!(close(parse_quantity("300nm", Unit::Length).unwrap(), 300e-9));
        assert!(close(parse_quantity("825 µm", Unit::Length).unwrap(), 825e-6));
        assert!(close(parse_quantity("2 m", Unit::Length).unwrap(), 2.0));
        assert!(close(parse_quantity("2 mm", Unit::Length).unwrap(), 2e-3));
        assert!(close(
            parse_quantity("0.2 pH/sq", Unit::SheetInductance).unwrap(),
            0.2e-12
        ));
        assert!(close(parse_quantity("0.5 T", Unit::Field).unwrap(), 0.5));
        assert!(close(parse_quantity("500 mT", Unit::Field).unwrap(), 0.5));
        assert!(close(parse_quantity("100 /s", Unit::Rate).unwrap(), 100.0));
        assert!(close(parse_quantity("1 /ms", Unit::Rate).unwrap(), 1e3));
        assert!(close(
            parse_quantity("0.0652 /T^2", Unit::InverseFieldSquared).unwrap(),
            0.0652
        ));
        assert!(close(parse_quantity("-100 dBm", Unit::PowerDbm).unwrap(), -100.0));
        assert!(close(parse_quantity("1e-3 s", Unit::Time).unwrap(), 1e-3));
        assert!(close(parse_quantity("2.5e+2 ms", Unit::Time).unwrap(), 0.25));
        assert!(close(parse_quantity("11.9", Unit::Dimensionless).unwrap(), 11.9));
        assert!(close(parse_quantity("-2 MHz", Unit::Frequency).unwrap(), -2e6));
    }

    #[test]
    fn prefixes_round_once() {
        assert_eq!(parse_quantity("300 nm", Unit::Length).unwrap(), 300e-9);
        assert_eq!(parse_quantity("15.93 pH", Unit::Inductance).unwrap(), 15.93e-12);
        assert_eq!(parse_quantity("1.5e3 nm", Unit::Length).unwrap(), 1.5e-6);
        assert_eq!(parse_quantity("1 /us", Unit::Rate).unwrap(), 1e6);
    }

    #[test]
    fn strictness() {
        assert!(parse_quantity("7.5", Unit::Frequency)
            .unwrap_err()
            .contains("missing its unit"));
        assert!(parse_quantity("7.5 GHz", Unit::Length).is_err());
        assert!(parse_quantity("7.5 XHz", Unit::Frequency).is_err());
        assert!(parse_quantity("5 ms", Unit::Length).is_err());
        assert!(parse_quantity("GHz", Unit::Frequency).is_err());
        assert!(parse_quantity("3 kdBm", Unit::PowerDbm).is_err());
        assert!(parse_quantity("4 Hz", Unit::Dimensionless).is_err());
        assert!(parse_quantity("inf Hz", Unit::Frequency).is_err());
    }
}
