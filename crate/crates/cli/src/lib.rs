//! Command dispatch for the `renq` tool. Every command produces a
//! [`ResultTable`] (or, for `material-dump`, a config document); sweeps repeat
//! a single run over one overridden parameter.

pub mod table;

use std::collections::BTreeMap;
use std::f64::consts::PI;

use renq_core::analysis::{log_grid, robustness_budget, settings_for_range, speedup_curve, stark_budget};
use renq_core::gates::GateReport;
use renq_core::materials::{
    builtin_material, export_material, optimize_field_angles, report_at, resolve_material, symmetry_lookup, AngleObjective,
    CaseStudy, MaterialRecord, SymmetryRule, ER_YSO_REFERENCE_ANGLES, SYMMETRY_TABLE,
};
use renq_core::pulse::{optimize_pi_pulse, DetuningGrid, ErrorModel, PulseScan};
use renq_core::units::{parse_quantity, Dimension};
use renq_core::{Error, Result};

pub use table::{Cell, Column, ResultTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    SpeedupCurve,
    PiPulse,
    CnotReport,
    OptimizeAngles,
    StarkBudget,
    Robustness,
    Symmetry,
    MaterialDump,
}

impl CommandKind {
    pub fn name(&self) -> &'static str {
        match self {
            CommandKind::SpeedupCurve => "speedup-curve",
            CommandKind::PiPulse => "pi-pulse",
            CommandKind::CnotReport => "cnot-report",
            CommandKind::OptimizeAngles => "optimize-angles",
            CommandKind::StarkBudget => "stark-budget",
            CommandKind::Robustness => "robustness",
            CommandKind::Symmetry => "symmetry",
            CommandKind::MaterialDump => "material-dump",
        }
    }

    /// Parameters a sweep may override for this command.
    pub fn sweepable(&self) -> &'static [&'static str] {
        match self {
            CommandKind::CnotReport => &["r", "B", "Bac", "theta", "phi"],
            CommandKind::OptimizeAngles => &["r", "B", "Bac"],
            CommandKind::StarkBudget => &["r", "n", "target-error"],
            CommandKind::Robustness => &["r", "B", "Bac", "A"],
            CommandKind::PiPulse => &["target-error", "delta"],
            _ => &[],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Record,
}

/// Unparsed flag values, as typed. Echoed into the metadata.
#[derive(Debug, Clone, Default)]
pub struct RawArgs {
    pub material: Option<String>,
    pub r: Option<String>,
    pub b: Option<String>,
    pub b_ac: Option<String>,
    pub target_error: Option<String>,
    pub grid: Option<String>,
    pub model: Option<String>,
    pub theta: Option<String>,
    pub phi: Option<String>,
    pub group: Option<String>,
    pub n: Option<String>,
    pub f_act: Option<String>,
    pub f_cnot: Option<String>,
    pub stark_coef: Option<String>,
    pub a_j: Option<String>,
    pub delta: Option<String>,
    pub sweep: Option<String>,
}

impl RawArgs {
    fn echo(&self) -> Vec<(&'static str, &Option<String>)> {
        vec![
            ("material", &self.material),
            ("r", &self.r),
            ("B", &self.b),
            ("Bac", &self.b_ac),
            ("target-error", &self.target_error),
            ("grid", &self.grid),
            ("model", &self.model),
            ("theta", &self.theta),
            ("phi", &self.phi),
            ("group", &self.group),
            ("n", &self.n),
            ("f-act", &self.f_act),
            ("f-cnot", &self.f_cnot),
            ("stark-coef", &self.stark_coef),
            ("A", &self.a_j),
            ("delta", &self.delta),
            ("sweep", &self.sweep),
        ]
    }
}

/// Log-spaced error grid `lo:hi:per_decade`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub per_decade: usize,
}

impl GridSpec {
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::parse("--grid", format!("`{s}`: expected lo:hi:points_per_decade, e.g. 1e-8:1e-2:10"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let per_decade: usize = parts[2].trim().parse().map_err(|_| bad())?;
        if !(lo > 0.0 && hi > lo && per_decade > 0) {
            return Err(Error::parse("--grid", format!("`{s}`: need 0 < lo < hi and points > 0")));
        }
        Ok(Self { lo, hi, per_decade })
    }
}

/// One swept parameter: `name=lo:hi:count`, linear, endpoints included.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub param: String,
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl SweepSpec {
    pub fn parse(s: &str, command: CommandKind) -> Result<Self> {
        let (name, range) = s
            .split_once('=')
            .ok_or_else(|| Error::parse("--sweep", format!("`{s}`: expected name=lo:hi:count")))?;
        let name = name.trim();
        if !command.sweepable().contains(&name) {
            return Err(Error::parse(
                "--sweep",
                format!("`{name}` cannot be swept for {} (allowed: {})", command.name(), command.sweepable().join(", ")),
            ));
        }
        let parts: Vec<&str> = range.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::parse("--sweep", format!("`{range}`: expected lo:hi:count")));
        }
        let flag = format!("--sweep {name}");
        let lo = parse_param(name, parts[0], &flag)?;
        let hi = parse_param(name, parts[1], &flag)?;
        let count: usize = parts[2].trim().parse().map_err(|_| Error::parse(&flag, "count must be a positive integer"))?;
        if count == 0 {
            return Err(Error::parse(&flag, "count must be a positive integer"));
        }
        Ok(Self { param: name.to_string(), lo, hi, count })
    }

    /// Grid values; reversing lo and hi reverses the list bit for bit.
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.lo];
        }
        let m = (self.count - 1) as f64;
        (0..self.count).map(|k| self.lo * ((self.count - 1 - k) as f64 / m) + self.hi * (k as f64 / m)).collect()
    }
}

/// Quantity from the command line: "10nm", "10 nm" or a bare SI number.
pub fn parse_cli_quantity(text: &str, dim: Dimension, flag: &str) -> Result<f64> {
    let t = text.trim();
    if let Ok(v) = t.parse::<f64>() {
        if v.is_finite() {
            return Ok(v);
        }
    }
    let split = (1..=t.len()).rev().filter(|&k| t.is_char_boundary(k)).find(|&k| t[..k].parse::<f64>().is_ok());
    match split {
        Some(k) => parse_quantity(&format!("{} {}", &t[..k], t[k..].trim()), dim, flag),
        None => Err(Error::parse(flag, format!("`{t}` is not a quantity"))),
    }
}

/// Angle in degrees unless a unit is given; returns radians.
pub fn parse_angle(text: &str, flag: &str) -> Result<f64> {
    match text.trim().parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v.to_radians()),
        _ => parse_cli_quantity(text, Dimension::Angle, flag),
    }
}

fn parse_number(text: &str, flag: &str) -> Result<f64> {
    text.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::parse(flag, format!("`{text}` is not a number")))
}

fn parse_param(name: &str, text: &str, flag: &str) -> Result<f64> {
    match name {
        "r" => parse_cli_quantity(text, Dimension::Length, flag),
        "B" | "Bac" => parse_cli_quantity(text, Dimension::MagneticField, flag),
        "theta" | "phi" => parse_angle(text, flag),
        "A" | "delta" => parse_cli_quantity(text, Dimension::Frequency, flag),
        _ => parse_number(text, flag),
    }
}

/// Fully parsed and validated run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: CommandKind,
    pub raw: RawArgs,
    pub material: String,
    pub r: f64,
    pub b: f64,
    pub b_ac: f64,
    pub target_error: Option<f64>,
    pub grid: GridSpec,
    pub model: ErrorModel,
    pub theta: Option<f64>,
    pub phi: Option<f64>,
    pub group: Option<String>,
    pub n: f64,
    pub f_act: Option<f64>,
    pub f_cnot: Option<f64>,
    pub stark_coef: Option<f64>,
    pub a_j: f64,
    /// Minimal detuning for pi-pulse, Hz.
    pub delta: f64,
    pub sweep: Option<SweepSpec>,
}

pub const DEFAULT_MATERIAL: &str = "er-yso-site1";

impl RunConfig {
    /// Parses every flag and checks command-specific requirements before any
    /// computation starts.
    pub fn from_raw(command: CommandKind, raw: RawArgs) -> Result<Self> {
        let q = |v: &Option<String>, dim, flag: &str, default: f64| -> Result<f64> {
            v.as_deref().map_or(Ok(default), |s| parse_cli_quantity(s, dim, flag))
        };
        let num = |v: &Option<String>, flag: &str| -> Result<Option<f64>> { v.as_deref().map(|s| parse_number(s, flag)).transpose() };
        let model = match raw.model.as_deref() {
            None | Some("full") => ErrorModel::Full,
            Some("first-order") | Some("first_order") => ErrorModel::FirstOrder,
            Some(other) => return Err(Error::parse("--model", format!("`{other}`: expected full or first-order"))),
        };
        let cfg = Self {
            command,
            material: raw.material.clone().unwrap_or_else(|| DEFAULT_MATERIAL.to_string()),
            r: q(&raw.r, Dimension::Length, "--r", 10e-9)?,
            b: q(&raw.b, Dimension::MagneticField, "--B", 1.0)?,
            b_ac: q(&raw.b_ac, Dimension::MagneticField, "--Bac", 1e-3)?,
            target_error: num(&raw.target_error, "--target-error")?,
            grid: raw.grid.as_deref().map_or(Ok(GridSpec { lo: 1e-8, hi: 1e-2, per_decade: 10 }), GridSpec::parse)?,
            model,
            theta: raw.theta.as_deref().map(|s| parse_angle(s, "--theta")).transpose()?,
            phi: raw.phi.as_deref().map(|s| parse_angle(s, "--phi")).transpose()?,
            group: raw.group.clone(),
            n: num(&raw.n, "--n")?.unwrap_or(1e4),
            f_act: num(&raw.f_act, "--f-act")?,
            f_cnot: num(&raw.f_cnot, "--f-cnot")?,
            stark_coef: raw.stark_coef.as_deref().map(|s| parse_cli_quantity(s, Dimension::StarkCoefficient, "--stark-coef")).transpose()?,
            a_j: q(&raw.a_j, Dimension::Frequency, "--A", 1e9)?,
            delta: q(&raw.delta, Dimension::Frequency, "--delta", 1e6)?,
            sweep: raw.sweep.as_deref().map(|s| SweepSpec::parse(s, command)).transpose()?,
            raw,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        for (flag, v) in [("--r", self.r), ("--B", self.b), ("--Bac", self.b_ac), ("--A", self.a_j), ("--delta", self.delta)] {
            if !(v > 0.0) {
                return Err(Error::parse(flag, "must be positive"));
            }
        }
        if let Some(e) = self.target_error {
            if !(e > 0.0 && e < 1.0) {
                return Err(Error::parse("--target-error", "must lie in (0, 1)"));
            }
        }
        for (flag, f) in [("--f-act", self.f_act), ("--f-cnot", self.f_cnot)] {
            if let Some(f) = f {
                if !(f > 0.0 && f < 1.0) {
                    return Err(Error::parse(flag, "must lie in (0, 1)"));
                }
            }
        }
        match self.command {
            CommandKind::CnotReport if self.theta.is_some() != self.phi.is_some() => {
                Err(Error::parse("--theta/--phi", "give both angles or neither (neither: optimise)"))
            }
            CommandKind::SpeedupCurve if self.sweep.is_some() => Err(Error::parse("--sweep", "speedup-curve already runs over --grid")),
            CommandKind::MaterialDump | CommandKind::Symmetry if self.sweep.is_some() => {
                Err(Error::parse("--sweep", format!("{} has no numeric parameters", self.command.name())))
            }
            CommandKind::Symmetry => self.group.as_deref().map_or(Ok(()), |g| symmetry_lookup(g).map(|_| ())),
            _ => Ok(()),
        }
    }

    fn with_override(&self, param: &str, v: f64) -> Self {
        let mut c = self.clone();
        match param {
            "r" => c.r = v,
            "B" => c.b = v,
            "Bac" => c.b_ac = v,
            "theta" => c.theta = Some(v),
            "phi" => c.phi = Some(v),
            "n" => c.n = v,
            "target-error" => c.target_error = Some(v),
            "A" => c.a_j = v,
            "delta" => c.delta = v,
            _ => unreachable!("sweep parameters are validated on parse"),
        }
        c
    }
}

/// What a command writes.
#[derive(Debug, Clone, PartialEq)]
pub enum Output {
    Table(ResultTable),
    /// A config document (material-dump).
    Document(String),
}

impl Output {
    pub fn render(&self, format: Format) -> String {
        match (self, format) {
            (Output::Table(t), Format::Csv) => t.to_csv(),
            (Output::Table(t), Format::Record) => t.to_record(),
            (Output::Document(d), _) => d.clone(),
        }
    }
}

/// Runs the command, or the sweep when one is configured.
pub fn run(cfg: &RunConfig) -> Result<Output> {
    let out = match &cfg.sweep {
        None => run_single(cfg)?,
        Some(s) => {
            let mut acc: Option<ResultTable> = None;
            for v in s.values() {
                let Output::Table(t) = run_single(&cfg.with_override(&s.param, v))? else {
                    unreachable!("sweepable commands return tables")
                };
                match acc.as_mut() {
                    None => acc = Some(t),
                    Some(a) => a.rows.extend(t.rows),
                }
            }
            let mut t = acc.expect("sweep count >= 1");
            t.meta("sweep.param", &s.param);
            t.meta("sweep.count", s.count);
            Output::Table(t)
        }
    };
    Ok(match out {
        Output::Table(mut t) => {
            t.meta("command", cfg.command.name());
            t.meta("version", env!("CARGO_PKG_VERSION"));
            for (k, v) in cfg.raw.echo() {
                if let Some(v) = v {
                    t.meta(&format!("input.{k}"), v);
                }
            }
            Output::Table(t)
        }
        d => d,
    })
}

fn material(cfg: &RunConfig) -> Result<MaterialRecord> {
    resolve_material(&cfg.material)
}

fn is_builtin_er_yso(name: &str) -> bool {
    builtin_material(name).is_ok()
}

fn run_single(cfg: &RunConfig) -> Result<Output> {
    Ok(Output::Table(match cfg.command {
        CommandKind::SpeedupCurve => speedup_table(cfg)?,
        CommandKind::PiPulse => pi_pulse_table(cfg)?,
        CommandKind::CnotReport => cnot_table(cfg)?,
        CommandKind::OptimizeAngles => angles_table(cfg)?,
        CommandKind::StarkBudget => stark_table(cfg)?,
        CommandKind::Robustness => robustness_table(cfg)?,
        CommandKind::Symmetry => symmetry_table(cfg)?,
        CommandKind::MaterialDump => return Ok(Output::Document(export_material(&material(cfg)?)?)),
    }))
}

fn speedup_table(cfg: &RunConfig) -> Result<ResultTable> {
    let g = cfg.grid;
    let errors = log_grid(g.lo, g.hi, g.per_decade);
    let settings = settings_for_range(g.lo, g.hi);
    let scan = PulseScan::new(cfg.model, settings)?;
    let window = (g.lo.max(1e-8), g.hi.min(1e-3));
    let c = speedup_curve(&scan, &errors, window)?;
    let mut t = ResultTable::new(&[
        ("target_error", "1"),
        ("tau", "1"),
        ("tau_half", "1"),
        ("blockade_time", "1/dw"),
        ("direct_time", "1/dw"),
        ("speedup", "1"),
        ("speedup_fit", "1"),
    ]);
    for (k, p) in c.points.iter().enumerate() {
        t.push(vec![
            p.target_error.into(),
            c.tau[k].into(),
            c.tau_half[k].into(),
            p.blockade_time.into(),
            p.direct_time.into(),
            p.speedup.into(),
            c.overlay[k].into(),
        ]);
    }
    t.meta("model", cfg.model.name());
    t.meta("fit.a", c.fit.a);
    t.meta("fit.b", c.fit.b);
    t.meta("fit.window", format!("{}:{}", c.fit.window.0, c.fit.window.1));
    t.meta("fit.method", &c.fit.method);
    t.meta("fit.points_used", c.fit.points_used);
    t.meta("staircase_spacing", c.jump_spacing.map_or("none".into(), |s| s.to_string()));
    t.meta("scan", format!("{:?}", settings));
    t.meta("convention", "dw = 2J/hbar; direct gate time pi/(2 dw); tau = T_pi dw");
    Ok(t)
}

fn pi_pulse_table(cfg: &RunConfig) -> Result<ResultTable> {
    let eps = cfg.target_error.unwrap_or(1e-4);
    let dw = 2.0 * PI * cfg.delta;
    let r = optimize_pi_pulse(eps, dw, DetuningGrid::default(), cfg.model)?;
    let mut t = ResultTable::new(&[
        ("target_error", "1"),
        ("delta", "Hz"),
        ("t_pi", "s"),
        ("omega0", "rad/s"),
        ("t_width", "s"),
        ("t_cut", "s"),
        ("max_error", "1"),
        ("tau", "1"),
    ]);
    t.push(vec![eps.into(), cfg.delta.into(), r.t_pi.into(), r.omega0.into(), r.t_width.into(), r.t_cut.into(), r.max_error.into(), (r.t_pi * dw).into()]);
    t.meta("model", cfg.model.name());
    t.meta("check_grid", format!("{} log points over [dw, 16 dw] plus refined maxima", DetuningGrid::default().points));
    Ok(t)
}

const REPORT_COLUMNS: [(&str, &str); 19] = [
    ("r", "m"),
    ("B", "T"),
    ("Bac", "T"),
    ("theta", "deg"),
    ("phi", "deg"),
    ("f_min", "1"),
    ("total_error", "1"),
    ("dominant_error", "text"),
    ("coherence_error", "1"),
    ("activation_error", "1"),
    ("residual_error", "1"),
    ("residual_process", "text"),
    ("total_time", "s"),
    ("timed_total_time", "s"),
    ("t_cnot", "s"),
    ("t_act", "s"),
    ("t_x", "s"),
    ("j_dip", "Hz"),
    ("nuclear_axis_angle", "deg"),
];

fn report_row(cfg: &RunConfig, theta: f64, phi: f64, r: &GateReport) -> Vec<Cell> {
    let opt = |x: Option<f64>| x.map_or(Cell::Text("none".into()), Cell::Num);
    vec![
        cfg.r.into(),
        cfg.b.into(),
        cfg.b_ac.into(),
        theta.to_degrees().into(),
        phi.to_degrees().into(),
        r.f_min.into(),
        r.total_error.into(),
        r.dominant_error.name().into(),
        r.breakdown[0].1.into(),
        r.breakdown[1].1.into(),
        r.breakdown[2].1.into(),
        r.residual_process.clone().into(),
        r.total_time.into(),
        opt(r.timed_total_time),
        r.t_cnot.into(),
        r.t_act.into(),
        opt(r.t_x),
        r.j_dip.into(),
        r.nuclear_axis_angle.to_degrees().into(),
    ]
}

fn cnot_table(cfg: &RunConfig) -> Result<ResultTable> {
    let m = material(cfg)?;
    let cs = CaseStudy::new(cfg.r, cfg.b, cfg.b_ac)?;
    let (theta, phi, report, source) = match (cfg.theta, cfg.phi) {
        (Some(th), Some(ph)) => (th, ph, report_at(&m, &cs, th, ph)?, "given"),
        _ => {
            let o = optimize_field_angles(&m, &cs, AngleObjective::MinError, None)?;
            (o.theta, o.phi, o.report, "optimised")
        }
    };
    let mut t = ResultTable::new(&REPORT_COLUMNS);
    t.push(report_row(cfg, theta, phi, &report));
    t.meta("material", &m.name);
    t.meta("angles", source);
    t.meta("options", format!("{:?}", cs.options));
    t.meta("accounting", "total_time: t_CNOT + 2 t_act (instantaneous X); timed_total_time adds the echo X layers");
    Ok(t)
}

fn angles_table(cfg: &RunConfig) -> Result<ResultTable> {
    let m = material(cfg)?;
    let cs = CaseStudy::new(cfg.r, cfg.b, cfg.b_ac)?;
    let reference = is_builtin_er_yso(&cfg.material).then_some(ER_YSO_REFERENCE_ANGLES);
    let o = optimize_field_angles(&m, &cs, AngleObjective::MinError, reference)?;
    let mut t = ResultTable::new(&[("rank", "1"), ("theta", "deg"), ("phi", "deg"), ("total_error", "1")]);
    for (k, (th, ph, v)) in o.minima.iter().enumerate() {
        t.push(vec![(k as f64).into(), th.to_degrees().into(), ph.to_degrees().into(), (*v).into()]);
    }
    t.meta("material", &m.name);
    t.meta("best.theta_deg", o.theta.to_degrees());
    t.meta("best.phi_deg", o.phi.to_degrees());
    t.meta("best.f_min", o.report.f_min);
    t.meta("best.total_time_s", o.report.total_time);
    t.meta("flat", o.flat);
    t.meta("refinement_steps", o.log.len());
    t.meta("search", "10 deg grid, Nelder-Mead from up to 6 grid minima; angles in the g-tensor frame");
    if let Some(d) = &o.diagnostic {
        t.meta("frame.reference_deg", format!("{:?}", d.reference_deg));
        t.meta("frame.nearest_equivalent_deg", format!("{:?}", d.nearest_equivalent_deg));
        t.meta("frame.separation_deg", d.separation_deg);
        t.meta("frame.objective_at_reference", d.objective_at_reference);
        t.meta("frame.offset_flagged", d.offset_flagged);
    }
    Ok(t)
}

fn stark_table(cfg: &RunConfig) -> Result<ResultTable> {
    let coef = match cfg.stark_coef {
        Some(c) => c,
        None => material(cfg)?
            .stark_coefficient
            .ok_or_else(|| Error::parse("--stark-coef", format!("material `{}` has no Stark coefficient; pass --stark-coef", cfg.material)))?,
    };
    let f_def = 1.0 - cfg.target_error.unwrap_or(1e-2);
    let (fa, fc) = (cfg.f_act.unwrap_or(f_def), cfg.f_cnot.unwrap_or(f_def));
    let b = stark_budget(cfg.n, cfg.r, fa, fc, coef)?;
    let mut t = ResultTable::new(&[
        ("n", "1"),
        ("r", "m"),
        ("f_act", "1"),
        ("f_cnot", "1"),
        ("delta_omega_st", "rad/s"),
        ("delta_e", "V/cm"),
        ("stark_coefficient", "Hz/(V/m)"),
    ]);
    t.push(vec![b.n.into(), b.r.into(), fa.into(), fc.into(), b.delta_omega_st.into(), b.delta_e_v_per_cm().into(), coef.into()]);
    Ok(t)
}

fn robustness_table(cfg: &RunConfig) -> Result<ResultTable> {
    let x = robustness_budget(cfg.a_j, cfg.b_ac, cfg.b, cfg.r)?;
    let mut t = ResultTable::new(&[
        ("r", "m"),
        ("B", "T"),
        ("Bac", "T"),
        ("A", "Hz"),
        ("j_dip", "Hz"),
        ("dphi_single", "rad"),
        ("dphi_cnot", "rad"),
        ("flip_suppression", "1"),
        ("j_hop", "Hz"),
        ("ops_to_error", "1"),
    ]);
    t.push(vec![
        cfg.r.into(),
        cfg.b.into(),
        cfg.b_ac.into(),
        cfg.a_j.into(),
        x.j_dip.into(),
        x.dphi_single.into(),
        x.dphi_cnot.into(),
        x.flip_suppression.into(),
        x.j_hop.into(),
        x.ops_to_error.into(),
    ]);
    t.meta("scales", "J = mu0 mu_B^2/(4 pi r^3), E_Z = mu_B B; dphi_cnot = (A/hbar)(J/E_Z)^2 t_CNOT");
    Ok(t)
}

fn symmetry_row(s: &SymmetryRule) -> Vec<Cell> {
    vec![
        s.point_group.into(),
        s.crystal_system.into(),
        (if s.has_inversion { "yes" } else { "no" }).into(),
        s.g_perp_zero.label().into(),
        (if s.allows_electric_dipole { "yes" } else { "no" }).into(),
        s.note.unwrap_or("").into(),
    ]
}

fn symmetry_table(cfg: &RunConfig) -> Result<ResultTable> {
    let mut t = ResultTable::new(&[
        ("point_group", "text"),
        ("crystal_system", "text"),
        ("inversion", "text"),
        ("g_perp_zero", "text"),
        ("electric_dipole", "text"),
        ("note", "text"),
    ]);
    match &cfg.group {
        Some(g) => t.push(symmetry_row(&symmetry_lookup(g)?)),
        None => SYMMETRY_TABLE.iter().for_each(|s| t.push(symmetry_row(s))),
    }
    Ok(t)
}

/// Machine-readable error record.
pub fn error_record(e: &Error) -> String {
    let mut m = BTreeMap::new();
    m.insert("kind", e.kind().to_string());
    m.insert("message", e.to_string());
    if let Error::Parse { path, .. } = e {
        m.insert("path", path.clone());
    }
    serde_json::json!({ "error": m }).to_string()
}

/// Exit status: 2 for bad input, 3 when the computation cannot be done.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Input(_) | Error::Parse { .. } => 2,
        _ => 3,
    }
}
