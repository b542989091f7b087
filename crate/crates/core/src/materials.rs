//! Material records, point-group rules and the field-angle search for a
//! concrete host.
//!
//! Angles: theta is the polar angle from the crystal z axis of the frame the
//! g-tensors are written in, phi the azimuth from x. For Er:YSO that is the
//! site-1, orientation-I frame of the tabulated tensors.

use std::f64::consts::PI;
use std::path::Path;

use nalgebra::{Matrix3, Vector3};
use toml::{Table, Value};

use crate::constants::{H, MU_B};
use crate::error::{Error, Result};
use crate::gates::{cnot_report, CnotOptions, GateReport, OpticalDrive};
use crate::ion::{direction, DipolePair, EncodingKind, FieldSpec, GTensor, IonSpec, QubitEncoding};
use crate::optim::nelder_mead;
use crate::units::{format_quantity, parse_quantity, Dimension};

/// Condition under which a point group admits g_perp = 0 doublets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GPerpZero {
    Never,
    /// Only for J = 3/2.
    OnlyJ3Half,
    /// For any J > 1/2.
    JAboveHalf,
}

impl GPerpZero {
    pub fn allows(&self, j: f64) -> bool {
        match self {
            GPerpZero::Never => false,
            GPerpZero::OnlyJ3Half => (j - 1.5).abs() < 1e-9,
            GPerpZero::JAboveHalf => j > 0.5 + 1e-9,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            GPerpZero::Never => "no",
            GPerpZero::OnlyJ3Half => "yes (J = 3/2)",
            GPerpZero::JAboveHalf => "yes (J > 1/2)",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymmetryRule {
    pub point_group: &'static str,
    pub crystal_system: &'static str,
    pub has_inversion: bool,
    pub g_perp_zero: GPerpZero,
    /// Every Kramers doublet carries an electric dipole (Stark gating possible).
    pub allows_electric_dipole: bool,
    pub note: Option<&'static str>,
}

const E3_NOTE: &str = "only doublets of the E3-bar double-group representation carry an electric dipole";

macro_rules! rule {
    ($g:expr, $sys:expr, $inv:expr, $gp:ident, $ed:expr) => {
        SymmetryRule { point_group: $g, crystal_system: $sys, has_inversion: $inv, g_perp_zero: GPerpZero::$gp, allows_electric_dipole: $ed, note: None }
    };
    ($g:expr, $sys:expr, $inv:expr, $gp:ident, $ed:expr, $note:expr) => {
        SymmetryRule { point_group: $g, crystal_system: $sys, has_inversion: $inv, g_perp_zero: GPerpZero::$gp, allows_electric_dipole: $ed, note: Some($note) }
    };
}

/// The 32 crystallographic point groups (Schoenflies symbols).
pub const SYMMETRY_TABLE: [SymmetryRule; 32] = [
    rule!("C1", "triclinic", false, Never, true),
    rule!("Ci", "triclinic", true, Never, false),
    rule!("C2", "monoclinic", false, Never, true),
    rule!("Cs", "monoclinic", false, Never, true),
    rule!("C2h", "monoclinic", true, Never, false),
    rule!("D2", "orthorhombic", false, Never, true),
    rule!("C2v", "orthorhombic", false, Never, true),
    rule!("D2h", "orthorhombic", true, Never, false),
    rule!("C4", "tetragonal", false, OnlyJ3Half, true),
    rule!("S4", "tetragonal", false, OnlyJ3Half, true),
    rule!("C4h", "tetragonal", true, OnlyJ3Half, false),
    rule!("D4", "tetragonal", false, OnlyJ3Half, true),
    rule!("C4v", "tetragonal", false, OnlyJ3Half, true),
    rule!("D2d", "tetragonal", false, OnlyJ3Half, true),
    rule!("D4h", "tetragonal", true, OnlyJ3Half, false),
    rule!("C3", "trigonal", false, JAboveHalf, true),
    rule!("S6", "trigonal", true, JAboveHalf, false),
    rule!("D3", "trigonal", false, JAboveHalf, true),
    rule!("C3v", "trigonal", false, JAboveHalf, true),
    rule!("D3d", "trigonal", true, JAboveHalf, false),
    rule!("C6", "hexagonal", false, JAboveHalf, true),
    rule!("C3h", "hexagonal", false, JAboveHalf, true, E3_NOTE),
    rule!("C6h", "hexagonal", true, JAboveHalf, false),
    rule!("D6", "hexagonal", false, JAboveHalf, true),
    rule!("C6v", "hexagonal", false, JAboveHalf, true),
    rule!("D3h", "hexagonal", false, JAboveHalf, false, E3_NOTE),
    rule!("D6h", "hexagonal", true, JAboveHalf, false),
    rule!("T", "cubic", false, Never, true),
    rule!("Th", "cubic", true, Never, false),
    rule!("Td", "cubic", false, Never, false, "no inversion, yet Kramers doublets carry no electric dipole"),
    rule!("O", "cubic", false, Never, true),
    rule!("Oh", "cubic", true, Never, false),
];

fn normalize_group(s: &str) -> String {
    let k: String = s.chars().filter(|c| !matches!(c, '_' | '{' | '}' | ' ' | '$')).collect::<String>().to_lowercase();
    match k.as_str() {
        "s2" => "ci".into(),
        "c3i" => "s6".into(),
        "c1h" => "cs".into(),
        "v" => "d2".into(),
        _ => k,
    }
}

/// Point-group row by Schoenflies symbol (case and underscores ignored;
/// S2 = Ci, C3i = S6, C1h = Cs accepted).
pub fn symmetry_lookup(point_group: &str) -> Result<SymmetryRule> {
    let k = normalize_group(point_group);
    SYMMETRY_TABLE
        .iter()
        .find(|r| r.point_group.to_lowercase() == k)
        .copied()
        .ok_or_else(|| Error::Input(format!("unknown point group `{point_group}`")))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaterialRecord {
    pub name: String,
    pub site: String,
    pub point_group: String,
    pub source: String,
    /// Stark coefficient, Hz per (V/m).
    pub stark_coefficient: Option<f64>,
    /// Optical wavelength, m (informational).
    pub wavelength: Option<f64>,
    pub oscillator_strength: Option<f64>,
    /// Keys whose values are assumptions rather than measurements.
    pub assumed: Vec<String>,
    pub ion: IonSpec,
}

impl MaterialRecord {
    pub fn validate(&self) -> Result<()> {
        symmetry_lookup(&self.point_group)?;
        self.ion.validate()?;
        self.ion.check_kramers()
    }

    pub fn symmetry(&self) -> Result<SymmetryRule> {
        symmetry_lookup(&self.point_group)
    }
}

/// Er:YSO site 1 tensors, crystal frame of the site, orientation I.
pub const ER_YSO_G_GROUND: [[f64; 3]; 3] = [[3.07, -3.12, 3.40], [-3.12, 8.16, -5.76], [3.40, -5.76, 5.79]];
pub const ER_YSO_G_EXCITED: [[f64; 3]; 3] = [[1.95, -2.21, 3.58], [-2.21, 4.23, -5.00], [3.58, -5.00, 7.89]];

const ER_YSO_TOML: &str = r#"
name = "Er:YSO site 1"
site = "Er site 1, orientation I"
point_group = "C1"
source = "167Er:Y2SiO5; g-tensors from EPR of site 1, A_15/2 from the hyperfine tensor, f and T2 from optical spectroscopy"
wavelength = "1536.5 nm"
oscillator_strength = 1.1e-7
assumed = ["ion.a_j_excited", "ion.delta_cf"]

[ion]
j_ground = "15/2"
j_excited = "13/2"
nuclear_spin = "7/2"
g_j_ground = 1.2
g_j_excited = 1.1076923076923078
g_n = -0.16
a_j_ground = "103.6 MHz"
a_j_excited = "103.6 MHz"
delta_j = "195 THz"
delta_cf = "40 cm^-1"
mu_e = "2.0e-32 C*m"
t2 = "4.4 ms"
g_ground = [[3.07, -3.12, 3.40], [-3.12, 8.16, -5.76], [3.40, -5.76, 5.79]]
g_excited = [[1.95, -2.21, 3.58], [-2.21, 4.23, -5.00], [3.58, -5.00, 7.89]]
"#;

/// Names of the built-in records.
pub const BUILTIN: [&str; 1] = ["er-yso-site1"];

/// Built-in record by name ("er-yso-site1"; "Er:YSO site 1" also accepted).
pub fn builtin_material(name: &str) -> Result<MaterialRecord> {
    let k: String = name.to_lowercase().chars().filter(|c| c.is_ascii_alphanumeric()).collect();
    match k.as_str() {
        "eryso" | "erysosite1" | "er167ysosite1" => load_material_str(ER_YSO_TOML),
        _ => Err(Error::Input(format!("no built-in material `{name}` (known: {})", BUILTIN.join(", ")))),
    }
}

/// Built-in name or path to a config file.
pub fn resolve_material(name_or_path: &str) -> Result<MaterialRecord> {
    match builtin_material(name_or_path) {
        Ok(m) => Ok(m),
        Err(_) if Path::new(name_or_path).exists() => load_material_file(Path::new(name_or_path)),
        Err(e) => Err(e),
    }
}

pub fn load_material_file(path: &Path) -> Result<MaterialRecord> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::parse(path.display().to_string(), e.to_string()))?;
    load_material_str(&text)
}

struct Doc<'a> {
    table: &'a Table,
    prefix: &'a str,
}

impl<'a> Doc<'a> {
    fn path(&self, key: &str) -> String {
        if self.prefix.is_empty() {
            key.to_string()
        } else {
            format!("{}.{key}", self.prefix)
        }
    }

    fn get(&self, key: &str) -> Result<&'a Value> {
        self.table.get(key).ok_or_else(|| Error::parse(self.path(key), "missing field"))
    }

    fn string(&self, key: &str) -> Result<String> {
        match self.get(key)? {
            Value::String(s) => Ok(s.clone()),
            _ => Err(Error::parse(self.path(key), "expected a string")),
        }
    }

    fn opt_string(&self, key: &str) -> Result<Option<String>> {
        if self.table.contains_key(key) { self.string(key).map(Some) } else { Ok(None) }
    }

    fn number(&self, key: &str) -> Result<f64> {
        number_value(self.get(key)?, &self.path(key))
    }

    fn opt_number(&self, key: &str) -> Result<Option<f64>> {
        if self.table.contains_key(key) { self.number(key).map(Some) } else { Ok(None) }
    }

    /// Half-integer as a number or "a/b" string.
    fn spin(&self, key: &str) -> Result<f64> {
        let p = self.path(key);
        match self.get(key)? {
            Value::String(s) => match s.split_once('/') {
                Some((a, b)) => {
                    let (a, b): (f64, f64) = (
                        a.trim().parse().map_err(|_| Error::parse(&p, "bad numerator"))?,
                        b.trim().parse().map_err(|_| Error::parse(&p, "bad denominator"))?,
                    );
                    Ok(a / b)
                }
                None => s.trim().parse().map_err(|_| Error::parse(&p, "expected a half-integer")),
            },
            v => number_value(v, &p),
        }
    }

    fn quantity(&self, key: &str, dim: Dimension) -> Result<f64> {
        let p = self.path(key);
        match self.get(key)? {
            Value::String(s) => parse_quantity(s, dim, &p),
            Value::Float(_) | Value::Integer(_) => {
                Err(Error::parse(&p, format!("missing unit (write e.g. \"1.0 {}\")", dim.si_unit())))
            }
            _ => Err(Error::parse(&p, "expected a quantity string")),
        }
    }

    fn opt_quantity(&self, key: &str, dim: Dimension) -> Result<Option<f64>> {
        if self.table.contains_key(key) { self.quantity(key, dim).map(Some) } else { Ok(None) }
    }

    fn g_tensor(&self, key: &str) -> Result<GTensor> {
        let p = self.path(key);
        match self.get(key)? {
            Value::Array(rows) => {
                if rows.len() != 3 {
                    return Err(Error::parse(&p, "g-tensor needs 3 rows"));
                }
                let mut m = Matrix3::zeros();
                for (i, row) in rows.iter().enumerate() {
                    let cols = row.as_array().filter(|r| r.len() == 3).ok_or_else(|| Error::parse(format!("{p}[{i}]"), "row needs 3 entries"))?;
                    for (j, v) in cols.iter().enumerate() {
                        m[(i, j)] = number_value(v, &format!("{p}[{i}][{j}]"))?;
                    }
                }
                Ok(GTensor::from_matrix(m))
            }
            Value::Table(t) => {
                let d = Doc { table: t, prefix: &p };
                if t.contains_key("isotropic") {
                    return Ok(GTensor::isotropic(d.number("isotropic")?));
                }
                let axis = match d.get("axis")? {
                    Value::Array(a) if a.len() == 3 => {
                        let mut v = Vector3::zeros();
                        for (k, x) in a.iter().enumerate() {
                            v[k] = number_value(x, &format!("{p}.axis[{k}]"))?;
                        }
                        v
                    }
                    _ => return Err(Error::parse(format!("{p}.axis"), "expected [x, y, z]")),
                };
                GTensor::axial(d.number("g_par")?, d.number("g_perp")?, axis).map_err(|e| Error::parse(&p, e.to_string()))
            }
            _ => Err(Error::parse(&p, "expected a 3x3 array or {g_par, g_perp, axis} / {isotropic}")),
        }
    }
}

fn number_value(v: &Value, path: &str) -> Result<f64> {
    match v {
        Value::Float(f) => Ok(*f),
        Value::Integer(i) => Ok(*i as f64),
        _ => Err(Error::parse(path, "expected a number")),
    }
}

/// Parses and validates a material document (grammar in [`crate::units`]).
pub fn load_material_str(text: &str) -> Result<MaterialRecord> {
    let table: Table = text.parse().map_err(|e: toml::de::Error| Error::parse("<document>", e.to_string()))?;
    let top = Doc { table: &table, prefix: "" };
    let ion_table = match top.get("ion")? {
        Value::Table(t) => t,
        _ => return Err(Error::parse("ion", "expected a table")),
    };
    let d = Doc { table: ion_table, prefix: "ion" };
    let ion = IonSpec {
        j_ground: d.spin("j_ground")?,
        j_excited: d.spin("j_excited")?,
        nuclear_spin: d.spin("nuclear_spin")?,
        a_j_ground: d.quantity("a_j_ground", Dimension::Frequency)?,
        a_j_excited: d.quantity("a_j_excited", Dimension::Frequency)?,
        g_j_ground: d.number("g_j_ground")?,
        g_j_excited: d.number("g_j_excited")?,
        g_ground: d.g_tensor("g_ground")?,
        g_excited: d.g_tensor("g_excited")?,
        g_n: d.number("g_n")?,
        delta_j: d.quantity("delta_j", Dimension::Frequency)?,
        delta_cf: d.quantity("delta_cf", Dimension::Frequency)?,
        mu_e_transition: d.quantity("mu_e", Dimension::DipoleMoment)?,
        t2_excited: d.quantity("t2", Dimension::Time)?,
    };
    // field-specific checks first so the message carries the key path
    for (key, v) in [("ion.t2", ion.t2_excited), ("ion.delta_j", ion.delta_j), ("ion.delta_cf", ion.delta_cf)] {
        if !(v > 0.0) {
            return Err(Error::parse(key, format!("must be positive (got {v})")));
        }
    }
    if !(ion.mu_e_transition >= 0.0) {
        return Err(Error::parse("ion.mu_e", "must be non-negative"));
    }
    let assumed = match table.get("assumed") {
        None => vec![],
        Some(Value::Array(a)) => a
            .iter()
            .enumerate()
            .map(|(k, v)| v.as_str().map(str::to_string).ok_or_else(|| Error::parse(format!("assumed[{k}]"), "expected a string")))
            .collect::<Result<_>>()?,
        Some(_) => return Err(Error::parse("assumed", "expected an array of key names")),
    };
    let rec = MaterialRecord {
        name: top.string("name")?,
        site: top.opt_string("site")?.unwrap_or_default(),
        point_group: top.string("point_group")?,
        source: top.opt_string("source")?.unwrap_or_default(),
        stark_coefficient: top.opt_quantity("stark_coefficient", Dimension::StarkCoefficient)?,
        wavelength: top.opt_quantity("wavelength", Dimension::Length)?,
        oscillator_strength: top.opt_number("oscillator_strength")?,
        assumed,
        ion,
    };
    symmetry_lookup(&rec.point_group).map_err(|e| Error::parse("point_group", e.to_string()))?;
    rec.validate().map_err(|e| Error::parse("ion", e.to_string()))?;
    Ok(rec)
}

fn g_value(g: &GTensor) -> Value {
    Value::Array((0..3).map(|i| Value::Array((0..3).map(|j| Value::Float(g.matrix[(i, j)])).collect())).collect())
}

/// Writes a record in the same document format; reloading gives it back exactly.
pub fn export_material(rec: &MaterialRecord) -> Result<String> {
    let q = |v: f64, d: Dimension| Value::String(format_quantity(v, d));
    let mut ion = Table::new();
    let i = &rec.ion;
    ion.insert("j_ground".into(), Value::Float(i.j_ground));
    ion.insert("j_excited".into(), Value::Float(i.j_excited));
    ion.insert("nuclear_spin".into(), Value::Float(i.nuclear_spin));
    ion.insert("g_j_ground".into(), Value::Float(i.g_j_ground));
    ion.insert("g_j_excited".into(), Value::Float(i.g_j_excited));
    ion.insert("g_n".into(), Value::Float(i.g_n));
    ion.insert("a_j_ground".into(), q(i.a_j_ground, Dimension::Frequency));
    ion.insert("a_j_excited".into(), q(i.a_j_excited, Dimension::Frequency));
    ion.insert("delta_j".into(), q(i.delta_j, Dimension::Frequency));
    ion.insert("delta_cf".into(), q(i.delta_cf, Dimension::Frequency));
    ion.insert("mu_e".into(), q(i.mu_e_transition, Dimension::DipoleMoment));
    ion.insert("t2".into(), q(i.t2_excited, Dimension::Time));
    ion.insert("g_ground".into(), g_value(&i.g_ground));
    ion.insert("g_excited".into(), g_value(&i.g_excited));
    let mut top = Table::new();
    top.insert("name".into(), Value::String(rec.name.clone()));
    top.insert("site".into(), Value::String(rec.site.clone()));
    top.insert("point_group".into(), Value::String(rec.point_group.clone()));
    top.insert("source".into(), Value::String(rec.source.clone()));
    if let Some(s) = rec.stark_coefficient {
        top.insert("stark_coefficient".into(), q(s, Dimension::StarkCoefficient));
    }
    if let Some(w) = rec.wavelength {
        top.insert("wavelength".into(), q(w, Dimension::Length));
    }
    if let Some(f) = rec.oscillator_strength {
        top.insert("oscillator_strength".into(), Value::Float(f));
    }
    top.insert("assumed".into(), Value::Array(rec.assumed.iter().cloned().map(Value::String).collect()));
    top.insert("ion".into(), Value::Table(ion));
    toml::to_string(&top).map_err(|e| Error::Model(format!("export: {e}")))
}

/// B_min = margin * I * A_J h / mu_B, with A_J the larger doublet constant.
pub fn minimum_field(ion: &IonSpec, margin: f64) -> Result<f64> {
    if !(margin >= 1.0) {
        return Err(Error::Input(format!("margin must be >= 1 (got {margin})")));
    }
    let a = ion.a_j_ground.abs().max(ion.a_j_excited.abs());
    Ok(margin * ion.nuclear_spin * a * H / MU_B)
}

/// Inputs of the angle search besides the material.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaseStudy {
    /// Ion separation, m.
    pub r: f64,
    /// Static field magnitude, T.
    pub b: f64,
    /// Drive amplitude, T.
    pub b_ac: f64,
    pub options: CnotOptions,
}

impl CaseStudy {
    pub fn new(r: f64, b: f64, b_ac: f64) -> Result<Self> {
        if !(r > 0.0 && b > 0.0 && b_ac > 0.0) {
            return Err(Error::Input("r, B and B_ac must be positive".into()));
        }
        Ok(Self { r, b, b_ac, options: CnotOptions::default() })
    }
}

/// Active encoding the material supports: electronic only for an Ising doublet.
pub fn preferred_encoding(ion: &IonSpec) -> Result<QubitEncoding> {
    let p = ion.g_excited.principal();
    let kind = if p.values[0] > 0.0 && p.values[2] / p.values[0] < 1e-12 {
        EncodingKind::Electronic
    } else {
        EncodingKind::ElectroNuclear
    };
    QubitEncoding::standard(kind, ion.nuclear())
}

/// Gate report for one field direction.
pub fn report_at(material: &MaterialRecord, cs: &CaseStudy, theta: f64, phi: f64) -> Result<GateReport> {
    let ion = &material.ion;
    let field = FieldSpec::new(cs.b, theta, phi)?;
    let pair = DipolePair::identical(ion.clone(), Vector3::new(cs.r, 0.0, 0.0))?;
    let enc = preferred_encoding(ion)?;
    let drive = OpticalDrive { mu_e: ion.mu_e_transition, b_ac: cs.b_ac };
    cnot_report(&pair, &field, &enc, &drive, ion.t2_excited, &cs.options)
}

fn objective(material: &MaterialRecord, cs: &CaseStudy, theta: f64, phi: f64) -> f64 {
    report_at(material, cs, theta, phi).map(|r| r.total_error).unwrap_or(1.0)
}

/// Reference optimum for Er:YSO site 1 (theta, phi in degrees).
pub const ER_YSO_REFERENCE_ANGLES: (f64, f64) = (35.0, 132.0);

/// Where the search landed relative to a reference direction.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameDiagnostic {
    pub reference_deg: (f64, f64),
    pub found_deg: (f64, f64),
    /// Found angles mapped to the equivalent (b or -b) nearest the reference.
    pub nearest_equivalent_deg: (f64, f64),
    /// Angle between the two field directions modulo b -> -b, degrees.
    pub separation_deg: f64,
    pub objective_at_reference: f64,
    pub objective_at_found: f64,
    /// Set when the separation exceeds the 10 degree band.
    pub offset_flagged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AngleOptimization {
    pub theta: f64,
    pub phi: f64,
    pub report: GateReport,
    /// Best objective after each refinement step of the winning start.
    pub log: Vec<f64>,
    pub flat: bool,
    /// Grid points within tolerance of the minimum when the landscape is flat,
    /// otherwise the refined local minima (theta, phi, value).
    pub minima: Vec<(f64, f64, f64)>,
    pub diagnostic: Option<FrameDiagnostic>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AngleObjective {
    #[default]
    MinError,
}

/// Fold (theta, phi) into [0, pi] x [0, 2 pi).
pub fn fold_angles(theta: f64, phi: f64) -> (f64, f64) {
    let f = FieldSpec::new(1.0, theta, phi).expect("finite angles");
    (f.theta, f.phi)
}

/// (theta, phi) of -b.
pub fn opposite_angles(theta: f64, phi: f64) -> (f64, f64) {
    fold_angles(PI - theta, phi + PI)
}

fn angle_between_lines(a: (f64, f64), b: (f64, f64)) -> f64 {
    let (u, v) = (direction(a.0, a.1), direction(b.0, b.1));
    u.dot(&v).abs().clamp(0.0, 1.0).acos()
}

fn wrap_deg(x: f64) -> f64 {
    (x + 180.0).rem_euclid(360.0) - 180.0
}

/// Compares a found optimum with a reference direction (degrees).
pub fn frame_diagnostic(material: &MaterialRecord, cs: &CaseStudy, found: (f64, f64), reference_deg: (f64, f64)) -> FrameDiagnostic {
    let r = (reference_deg.0.to_radians(), reference_deg.1.to_radians());
    let alt = opposite_angles(found.0, found.1);
    let dist = |p: (f64, f64)| {
        let dt = p.0.to_degrees() - reference_deg.0;
        let dp = wrap_deg(p.1.to_degrees() - reference_deg.1);
        dt.hypot(dp)
    };
    let near = if dist(found) <= dist(alt) { found } else { alt };
    let sep = angle_between_lines(found, r).to_degrees();
    FrameDiagnostic {
        reference_deg,
        found_deg: (found.0.to_degrees(), found.1.to_degrees()),
        nearest_equivalent_deg: (near.0.to_degrees(), near.1.to_degrees()),
        separation_deg: sep,
        objective_at_reference: objective(material, cs, r.0, r.1),
        objective_at_found: objective(material, cs, found.0, found.1),
        offset_flagged: sep > 10.0,
    }
}

/// Minimises the CNOT error bound over field direction: 10 degree grid, then
/// Nelder-Mead from the best grid local minima. Deterministic.
pub fn optimize_field_angles(
    material: &MaterialRecord,
    cs: &CaseStudy,
    _objective: AngleObjective,
    reference_deg: Option<(f64, f64)>,
) -> Result<AngleOptimization> {
    material.validate()?;
    const STEP: f64 = 10.0;
    const STARTS: usize = 6;
    let nt = (180.0 / STEP) as usize + 1;
    let np = (360.0 / STEP) as usize;
    let mut grid = vec![vec![0.0; np]; nt];
    for (i, row) in grid.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = objective(material, cs, (i as f64 * STEP).to_radians(), (j as f64 * STEP).to_radians());
        }
    }
    let all: Vec<f64> = grid.iter().flatten().copied().collect();
    let (lo, hi) = all.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    let tol = 1e-9 * lo.abs().max(f64::MIN_POSITIVE);
    if hi - lo <= tol {
        let minima: Vec<(f64, f64, f64)> = (0..nt)
            .flat_map(|i| (0..np).map(move |j| (i, j)))
            .map(|(i, j)| ((i as f64 * STEP).to_radians(), (j as f64 * STEP).to_radians(), grid[i][j]))
            .collect();
        let (theta, phi, v) = minima[0];
        let report = report_at(material, cs, theta, phi)?;
        return Ok(AngleOptimization { theta, phi, report, log: vec![v], flat: true, minima, diagnostic: None });
    }
    // grid local minima, phi periodic, theta clamped
    let mut starts: Vec<(f64, usize, usize)> = vec![];
    for i in 0..nt {
        for j in 0..np {
            let v = grid[i][j];
            let mut is_min = true;
            for di in [-1i64, 0, 1] {
                for dj in [-1i64, 0, 1] {
                    let ii = i as i64 + di;
                    if (di, dj) == (0, 0) || ii < 0 || ii >= nt as i64 {
                        continue;
                    }
                    let jj = (j as i64 + dj).rem_euclid(np as i64) as usize;
                    if grid[ii as usize][jj] < v {
                        is_min = false;
                    }
                }
            }
            if is_min {
                starts.push((v, i, j));
            }
        }
    }
    starts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    starts.truncate(STARTS);
    let f = |p: &[f64]| objective(material, cs, p[0].to_radians(), p[1].to_radians());
    let mut results = vec![];
    for &(_, i, j) in &starts {
        let p0 = vec![i as f64 * STEP, j as f64 * STEP];
        let simplex = vec![p0.clone(), vec![p0[0] + STEP / 2.0, p0[1]], vec![p0[0], p0[1] + STEP / 2.0]];
        let r = nelder_mead(f, simplex, 1e-16, 500)?;
        let (t, p) = fold_angles(r.x[0].to_radians(), r.x[1].to_radians());
        results.push((r.value, t, p, r.log));
    }
    results.sort_by(|a, b| a.0.total_cmp(&b.0));
    let minima = results.iter().map(|(v, t, p, _)| (*t, *p, *v)).collect();
    let (_, theta, phi, log) = results.into_iter().next().ok_or_else(|| Error::Model("no start points".into()))?;
    let report = report_at(material, cs, theta, phi)?;
    let diagnostic = reference_deg.map(|r| frame_diagnostic(material, cs, (theta, phi), r));
    Ok(AngleOptimization { theta, phi, report, log, flat: false, minima, diagnostic })
}

/// Angles within +-tol_deg of a reference, allowing b -> -b.
pub fn angles_match(found: (f64, f64), reference_deg: (f64, f64), tol_deg: f64) -> bool {
    [found, opposite_angles(found.0, found.1)].iter().any(|&(t, p)| {
        (t.to_degrees() - reference_deg.0).abs() <= tol_deg && wrap_deg(p.to_degrees() - reference_deg.1).abs() <= tol_deg
    })
}

/// Approximate Y-Y nearest-neighbour distance in Y2SiO5, m.
pub const YSO_NEAREST_NEIGHBOR: f64 = 0.35e-9;

/// F_min against separation at fixed field direction.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceSweep {
    /// (r, F_min); F_min = 0 where the report fails (regime violated).
    pub rows: Vec<(f64, f64)>,
    /// Longest run of consecutive grid points with F_min above the threshold.
    pub best_range: Option<(f64, f64)>,
}

/// Sweeps r at fixed angles and finds the widest contiguous range above `threshold`.
pub fn distance_sweep(material: &MaterialRecord, cs: &CaseStudy, theta: f64, phi: f64, rs: &[f64], threshold: f64) -> DistanceSweep {
    let rows: Vec<(f64, f64)> = rs
        .iter()
        .map(|&r| {
            let c = CaseStudy { r, ..*cs };
            (r, report_at(material, &c, theta, phi).map(|x| x.f_min).unwrap_or(0.0))
        })
        .collect();
    let mut best: Option<(usize, usize)> = None;
    let mut start = None;
    for k in 0..=rows.len() {
        let ok = k < rows.len() && rows[k].1 > threshold;
        match (ok, start) {
            (true, None) => start = Some(k),
            (false, Some(s)) => {
                if best.map_or(true, |(a, b)| k - 1 - s > b - a) {
                    best = Some((s, k - 1));
                }
                start = None;
            }
            _ => {}
        }
    }
    DistanceSweep { best_range: best.map(|(a, b)| (rows[a].0, rows[b].0)), rows }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_rows() {
        let c1 = symmetry_lookup("C1").unwrap();
        assert_eq!((c1.g_perp_zero, c1.allows_electric_dipole), (GPerpZero::Never, true));
        let c4 = symmetry_lookup("C_4").unwrap();
        assert_eq!(c4.g_perp_zero, GPerpZero::OnlyJ3Half);
        assert!(c4.allows_electric_dipole && c4.g_perp_zero.allows(1.5) && !c4.g_perp_zero.allows(2.5));
        let oh = symmetry_lookup("O_h").unwrap();
        assert!(!oh.allows_electric_dipole && oh.g_perp_zero == GPerpZero::Never);
        assert!(symmetry_lookup("C5").is_err());
        assert_eq!(symmetry_lookup("S2").unwrap().point_group, "Ci");
    }

    #[test]
    fn table_invariants() {
        assert_eq!(SYMMETRY_TABLE.len(), 32);
        let mut names: Vec<_> = SYMMETRY_TABLE.iter().map(|r| r.point_group).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), 32);
        for r in SYMMETRY_TABLE {
            assert!(!(r.has_inversion && r.allows_electric_dipole), "{}", r.point_group);
            assert_eq!(symmetry_lookup(r.point_group).unwrap(), r);
        }
        for g in ["C3h", "D3h", "Td"] {
            assert!(symmetry_lookup(g).unwrap().note.is_some());
        }
    }

    #[test]
    fn er_yso_record() {
        let m = builtin_material("er-yso-site1").unwrap();
        assert!((m.ion.a_j_ground - 103.6e6).abs() < 1e-3);
        assert_eq!(m.ion.g_n, -0.16);
        assert!((m.ion.delta_j - 195e12).abs() < 1.0);
        assert!((m.ion.t2_excited - 4.4e-3).abs() < 1e-15);
        assert!((m.ion.mu_e_transition - 2.0e-32).abs() < 1e-45);
        assert!((m.wavelength.unwrap() - 1536.5e-9).abs() < 1e-18);
        assert_eq!(m.oscillator_strength, Some(1.1e-7));
        assert_eq!(m.ion.g_ground.matrix[(1, 2)], -5.76);
        assert_eq!(m.ion.g_excited.matrix[(2, 2)], 7.89);
        assert!(m.assumed.iter().any(|k| k == "ion.a_j_excited"));
    }

    #[test]
    fn round_trip() {
        let m = builtin_material("er-yso-site1").unwrap();
        let text = export_material(&m).unwrap();
        assert_eq!(load_material_str(&text).unwrap(), m);
    }

    #[test]
    fn rejects_bad_documents() {
        let bad_t2 = ER_YSO_TOML.replace("t2 = \"4.4 ms\"", "t2 = \"-4.4 ms\"");
        assert!(matches!(load_material_str(&bad_t2), Err(Error::Parse { path, .. }) if path == "ion.t2"));
        let no_unit = ER_YSO_TOML.replace("a_j_ground = \"103.6 MHz\"", "a_j_ground = 103.6");
        assert!(matches!(load_material_str(&no_unit), Err(Error::Parse { path, .. }) if path == "ion.a_j_ground"));
        let missing = ER_YSO_TOML.replace("g_n = -0.16\n", "");
        assert!(matches!(load_material_str(&missing), Err(Error::Parse { path, .. }) if path == "ion.g_n"));
        let group = ER_YSO_TOML.replace("point_group = \"C1\"", "point_group = \"X9\"");
        assert!(matches!(load_material_str(&group), Err(Error::Parse { path, .. }) if path == "point_group"));
    }

    #[test]
    fn minimum_field_values() {
        let m = builtin_material("er-yso-site1").unwrap();
        assert!((minimum_field(&m.ion, 1.0).unwrap() * 1e3 - 25.9).abs() < 0.1);
        assert!((minimum_field(&m.ion, 10.0).unwrap() - 0.259).abs() < 0.001);
        let mut ion = m.ion.clone();
        ion.a_j_ground = 0.0;
        ion.a_j_excited = 0.0;
        assert_eq!(minimum_field(&ion, 10.0).unwrap(), 0.0);
        assert!(minimum_field(&m.ion, 0.5).is_err());
    }

    #[test]
    fn equivalent_angles() {
        let (t, p) = opposite_angles(35f64.to_radians(), 132f64.to_radians());
        assert!((t.to_degrees() - 145.0).abs() < 1e-9 && (p.to_degrees() - 312.0).abs() < 1e-9);
        assert!(angles_match((t, p), (35.0, 132.0), 1e-6));
        assert!(!angles_match((0.0, 0.0), (35.0, 132.0), 10.0));
    }
}
