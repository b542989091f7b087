//! Quantities with explicit units in configuration text.
//!
//! Grammar (whitespace between number and unit is required):
//!
//! ```text
//! quantity  := number SP+ unit
//! number    := any literal accepted by f64::from_str ("2.0e-32", "-0.5", "103.6")
//! unit      := [prefix] base | compound
//! prefix    := f | p | n | u | µ | μ | m | k | M | G | T
//! ```
//!
//! Bases per dimension, converted to SI:
//!
//! | dimension          | bases                                          |
//! |--------------------|------------------------------------------------|
//! | frequency (E/h)    | Hz, J (divided by h), eV, cm^-1 (times 100 c)  |
//! | magnetic field     | T, G                                           |
//! | length             | m, Å / A                                       |
//! | time               | s                                              |
//! | dipole moment      | C*m, C m, D (debye)                            |
//! | electric field     | V/m, V/cm                                      |
//! | Stark coefficient  | <frequency>/(<electric field>)                 |
//! | angle              | rad, deg                                       |
//!
//! Prefixes apply to Hz, J, eV, T, G, m, s, C*m and V/m. Output always uses the
//! unprefixed SI base and Rust's shortest round-trip float formatting, so
//! write-then-read is exact.

use crate::constants::{C, H};
use crate::error::{Error, Result};

const EV: f64 = 1.602_176_634e-19;
const DEBYE: f64 = 3.335_640_951_981_52e-30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dimension {
    Frequency,
    MagneticField,
    Length,
    Time,
    DipoleMoment,
    ElectricField,
    StarkCoefficient,
    Angle,
}

impl Dimension {
    /// Canonical SI unit written on export.
    pub fn si_unit(&self) -> &'static str {
        match self {
            Dimension::Frequency => "Hz",
            Dimension::MagneticField => "T",
            Dimension::Length => "m",
            Dimension::Time => "s",
            Dimension::DipoleMoment => "C*m",
            Dimension::ElectricField => "V/m",
            Dimension::StarkCoefficient => "Hz/(V/m)",
            Dimension::Angle => "rad",
        }
    }
}

fn prefix_factor(p: &str) -> Option<f64> {
    Some(match p {
        "f" => 1e-15,
        "p" => 1e-12,
        "n" => 1e-9,
        "u" | "µ" | "μ" => 1e-6,
        "m" => 1e-3,
        "k" => 1e3,
        "M" => 1e6,
        "G" => 1e9,
        "T" => 1e12,
        _ => return None,
    })
}

/// (base, factor to SI, prefixable)
fn bases(dim: Dimension) -> &'static [(&'static str, f64, bool)] {
    match dim {
        Dimension::Frequency => &[("Hz", 1.0, true), ("J", 1.0 / H, true), ("eV", EV / H, true), ("cm^-1", 100.0 * C, false)],
        Dimension::MagneticField => &[("T", 1.0, true), ("G", 1e-4, true)],
        Dimension::Length => &[("m", 1.0, true), ("Å", 1e-10, false), ("A", 1e-10, false)],
        Dimension::Time => &[("s", 1.0, true)],
        Dimension::DipoleMoment => &[("C*m", 1.0, true), ("C m", 1.0, true), ("D", DEBYE, false)],
        Dimension::ElectricField => &[("V/m", 1.0, true), ("V/cm", 100.0, false)],
        Dimension::StarkCoefficient | Dimension::Angle => &[],
    }
}

fn simple_unit_factor(unit: &str, dim: Dimension) -> Option<f64> {
    if dim == Dimension::Angle {
        return match unit {
            "rad" => Some(1.0),
            "deg" | "°" => Some(std::f64::consts::PI / 180.0),
            _ => None,
        };
    }
    for &(base, f, _) in bases(dim) {
        if unit == base {
            return Some(f);
        }
    }
    for &(base, f, prefixable) in bases(dim) {
        if prefixable {
            if let Some(p) = unit.strip_suffix(base) {
                if let Some(pf) = prefix_factor(p) {
                    return Some(pf * f);
                }
            }
        }
    }
    None
}

/// SI factor of `unit` for the given dimension.
pub fn unit_factor(unit: &str, dim: Dimension) -> Option<f64> {
    if dim == Dimension::StarkCoefficient {
        let (num, den) = unit.split_once("/(")?;
        let den = den.strip_suffix(')')?;
        return Some(simple_unit_factor(num.trim(), Dimension::Frequency)? / simple_unit_factor(den.trim(), Dimension::ElectricField)?);
    }
    simple_unit_factor(unit, dim)
}

/// Parses "<number> <unit>" to SI. `path` names the config key for errors.
pub fn parse_quantity(text: &str, dim: Dimension, path: &str) -> Result<f64> {
    let t = text.trim();
    let (num, unit) = match t.split_once(char::is_whitespace) {
        Some((n, u)) => (n, u.trim()),
        None => {
            return Err(Error::parse(path, format!("`{t}` has no unit (expected e.g. `1.0 {}`)", dim.si_unit())));
        }
    };
    let v: f64 = num.parse().map_err(|_| Error::parse(path, format!("`{num}` is not a number")))?;
    if !v.is_finite() {
        return Err(Error::parse(path, "value must be finite"));
    }
    let f = unit_factor(unit, dim).ok_or_else(|| Error::parse(path, format!("unit `{unit}` is not a {dim:?} unit")))?;
    Ok(v * f)
}

/// SI value written with the canonical unit.
pub fn format_quantity(si: f64, dim: Dimension) -> String {
    format!("{si} {}", dim.si_unit())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prefixed_and_compound_units() {
        assert_eq!(parse_quantity("103.6 MHz", Dimension::Frequency, "a").unwrap(), 103.6 * 1e6);
        assert_eq!(parse_quantity("4.4 ms", Dimension::Time, "t").unwrap(), 4.4 * 1e-3);
        assert_eq!(parse_quantity("1 mT", Dimension::MagneticField, "b").unwrap(), 1e-3);
        assert_eq!(parse_quantity("10 G", Dimension::MagneticField, "b").unwrap(), 10.0 * 1e-4);
        assert_eq!(parse_quantity("2.0e-32 C*m", Dimension::DipoleMoment, "m").unwrap(), 2.0e-32);
        assert_eq!(parse_quantity("10 nm", Dimension::Length, "r").unwrap(), 10.0 * 1e-9);
        let s = parse_quantity("35 kHz/(V/cm)", Dimension::StarkCoefficient, "s").unwrap();
        assert!((s - 350.0).abs() < 1e-9);
        let k = parse_quantity("1 cm^-1", Dimension::Frequency, "k").unwrap();
        assert!((k - 29.979_245_8e9).abs() < 1.0);
        assert!((parse_quantity("180 deg", Dimension::Angle, "th").unwrap() - std::f64::consts::PI).abs() < 1e-15);
    }

    #[test]
    fn rejects_missing_or_wrong_units() {
        for (t, d) in [("103.6", Dimension::Frequency), ("1 T", Dimension::Time), ("x Hz", Dimension::Frequency), ("1 MT", Dimension::Length)] {
            match parse_quantity(t, d, "ion.a") {
                Err(Error::Parse { path, .. }) => assert_eq!(path, "ion.a"),
                other => panic!("{t}: {other:?}"),
            }
        }
    }

    #[test]
    fn format_round_trips() {
        for &(v, d) in &[(103.6e6 + 1e-8, Dimension::Frequency), (2.0e-32, Dimension::DipoleMoment), (350.0, Dimension::StarkCoefficient)] {
            assert_eq!(parse_quantity(&format_quantity(v, d), d, "x").unwrap(), v);
        }
    }
}
