//! Gate synthesis and scoring: the three-pulse X gate through an excited
//! level, the spin-echo controlled phase, the CNOT decomposition and the
//! error budget of a two-ion CNOT.
//!
//! Energies are E/h in Hz, times in seconds.

use std::f64::consts::PI;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::constants::{C, H, HBAR, MU_B, MU_N};
use crate::error::{Error, Result};
use crate::fidelity::min_gate_infidelity;
use crate::ion::{
    effective_moment, ising_coupling, ising_projection, level_labels, nuclear_axis_angle, nuclear_overlap,
    DipolePair, EncodingKind, FieldSpec, IonSpec, Manifold, MomentModel, QubitEncoding,
};
use crate::matrix::{c, identity, kron, sigma_x, sigma_y, sigma_z, CMatrix};

/// Smallest nuclear overlap accepted for a driven transition.
pub const MIN_OVERLAP: f64 = 1e-3;

const SQRT_PI: f64 = 1.772_453_850_905_516;

/// A level of one doublet, by energy rank.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Level {
    pub manifold: Manifold,
    pub index: usize,
}

impl Level {
    pub fn ground(index: usize) -> Self {
        Self { manifold: Manifold::Ground, index }
    }
    pub fn excited(index: usize) -> Self {
        Self { manifold: Manifold::Excited, index }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Segment {
    /// Resonant pi pulse on a ground-excited transition.
    Pulse { transition: (Level, Level), rabi: f64, overlap: f64, duration: f64 },
    Free { duration: f64 },
    /// Idealised instantaneous gate.
    Ideal { name: String, unitary: CMatrix },
}

impl Segment {
    pub fn duration(&self) -> f64 {
        match self {
            Segment::Pulse { duration, .. } | Segment::Free { duration } => *duration,
            Segment::Ideal { .. } => 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct GateSchedule {
    pub segments: Vec<Segment>,
}

impl GateSchedule {
    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(Segment::duration).sum()
    }

    pub fn pulses(&self) -> impl Iterator<Item = &Segment> {
        self.segments.iter().filter(|s| matches!(s, Segment::Pulse { .. }))
    }

    /// Durations non-negative and every level within the doublet dimension.
    pub fn validate(&self, doublet_dim: usize) -> Result<()> {
        for s in &self.segments {
            if !(s.duration() >= 0.0) {
                return Err(Error::Input("negative segment duration".into()));
            }
            if let Segment::Pulse { transition: (a, b), .. } = s {
                if a.index >= doublet_dim || b.index >= doublet_dim {
                    return Err(Error::Input("pulse references a missing level".into()));
                }
            }
        }
        Ok(())
    }
}

/// |<excited level| ground level>| of the nuclear parts, from the strong-field
/// labels and the angle between the two nuclear quantization axes.
pub fn transition_overlap(ion: &IonSpec, field: &FieldSpec, ground: usize, excited: usize) -> Result<f64> {
    let i = ion.nuclear();
    let beta = nuclear_axis_angle(ion, &field.direction())?;
    let lg = level_labels(i, ion.a_j_ground);
    let le = level_labels(i, ion.a_j_excited);
    let (g, e) = (
        lg.get(ground).ok_or_else(|| Error::Input(format!("no ground level {ground}")))?,
        le.get(excited).ok_or_else(|| Error::Input(format!("no excited level {excited}")))?,
    );
    Ok(nuclear_overlap(i, e.m, g.m, beta).abs())
}

fn check_overlap(o: f64, what: &str) -> Result<()> {
    if o < MIN_OVERLAP {
        Err(Error::Infeasible(format!("{what}: nuclear overlap {o:.2e} below {MIN_OVERLAP:e}")))
    } else {
        Ok(())
    }
}

/// Order-of-magnitude X-gate time 3 hbar/(mu_B B_ac): three electronic pulses.
pub fn x_gate_time_estimate(b_ac: f64) -> f64 {
    3.0 * HBAR / (MU_B * b_ac)
}

/// Time to flip the nuclear spin directly, hbar/(mu_N B_ac).
pub fn direct_nuclear_time(b_ac: f64) -> f64 {
    HBAR / (MU_N * b_ac)
}

/// Passive-qubit X gate via one excited level: pi pulses on (a, e), (b, e),
/// (a, e) with a the faster of the two passive levels. Each pulse lasts
/// hbar/(mu_B B_ac |overlap|).
pub fn x_gate_schedule(ion: &IonSpec, field: &FieldSpec, b_ac: f64) -> Result<GateSchedule> {
    if !(b_ac > 0.0) {
        return Err(Error::Input("B_ac must be positive".into()));
    }
    let n = ion.doublet_dim();
    let rabi = MU_B * b_ac / HBAR;
    let mut best: Option<(f64, GateSchedule)> = None;
    for e in 0..n {
        let o0 = transition_overlap(ion, field, 0, e)?;
        let o1 = transition_overlap(ion, field, 1, e)?;
        let (fast, slow, of, os) = if o0 >= o1 { (0, 1, o0, o1) } else { (1, 0, o1, o0) };
        if os < MIN_OVERLAP {
            continue;
        }
        let pulse = |g: usize, o: f64| Segment::Pulse {
            transition: (Level::ground(g), Level::excited(e)),
            rabi,
            overlap: o,
            duration: 1.0 / (rabi * o),
        };
        let s = GateSchedule { segments: vec![pulse(fast, of), pulse(slow, os), pulse(fast, of)] };
        let t = s.total_duration();
        if best.as_ref().map_or(true, |(bt, _)| t < *bt) {
            best = Some((t, s));
        }
    }
    match best {
        Some((_, s)) => Ok(s),
        None => {
            let beta = nuclear_axis_angle(ion, &field.direction())?;
            Err(Error::Infeasible(format!(
                "nuclear axes nearly parallel (angle {:.3e} rad): no transition pair with overlap >= {MIN_OVERLAP:e}",
                beta
            )))
        }
    }
}

/// Optical drive of the ground-excited transition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OpticalDrive {
    /// Transition dipole, C m.
    pub mu_e: f64,
    /// Magnetic amplitude of the light, T (E = c B).
    pub b_ac: f64,
}

impl OpticalDrive {
    /// Electronic Rabi frequency mu_e c B_ac / hbar, rad/s.
    pub fn rabi(&self) -> f64 {
        self.mu_e * C * self.b_ac / HBAR
    }

    /// Gaussian pi-pulse duration 2 sqrt(pi)/(Omega |overlap|).
    pub fn pi_time(&self, overlap: f64) -> f64 {
        2.0 * SQRT_PI / (self.rabi() * overlap)
    }
}

fn optical_pulse(ion: &IonSpec, field: &FieldSpec, drive: &OpticalDrive, g: usize, e: usize) -> Result<Segment> {
    let o = transition_overlap(ion, field, g, e)?;
    check_overlap(o, "optical transition")?;
    Ok(Segment::Pulse {
        transition: (Level::ground(g), Level::excited(e)),
        rabi: drive.rabi(),
        overlap: o,
        duration: drive.pi_time(o),
    })
}

/// Activation: passive |k> -> active |k> for k = 0, 1.
pub fn activation_schedule(
    ion: &IonSpec,
    field: &FieldSpec,
    drive: &OpticalDrive,
    encoding: &QubitEncoding,
) -> Result<GateSchedule> {
    encoding.validate(ion.doublet_dim())?;
    Ok(GateSchedule {
        segments: vec![
            optical_pulse(ion, field, drive, encoding.passive[0], encoding.active[0])?,
            optical_pulse(ion, field, drive, encoding.passive[1], encoding.active[1])?,
        ],
    })
}

/// X on the active qubit through a passive level: (fast, slow, fast).
pub fn active_x_schedule(
    ion: &IonSpec,
    field: &FieldSpec,
    drive: &OpticalDrive,
    encoding: &QubitEncoding,
) -> Result<GateSchedule> {
    encoding.validate(ion.doublet_dim())?;
    let [a0, a1] = encoding.active;
    let mut best: Option<GateSchedule> = None;
    for g in encoding.passive {
        let o0 = transition_overlap(ion, field, g, a0)?;
        let o1 = transition_overlap(ion, field, g, a1)?;
        if o0.min(o1) < MIN_OVERLAP {
            continue;
        }
        let (fast, slow) = if o0 >= o1 { (a0, a1) } else { (a1, a0) };
        let s = GateSchedule {
            segments: vec![
                optical_pulse(ion, field, drive, g, fast)?,
                optical_pulse(ion, field, drive, g, slow)?,
                optical_pulse(ion, field, drive, g, fast)?,
            ],
        };
        if best.as_ref().map_or(true, |b| s.total_duration() < b.total_duration()) {
            best = Some(s);
        }
    }
    best.ok_or_else(|| Error::Infeasible("active X gate: a slow transition has vanishing overlap".into()))
}

/// exp(-i pi sigma/4).
fn sqrt_pauli(p: &CMatrix) -> CMatrix {
    (p * c(0.0, -PI / 4.0)).exp()
}

/// C(pi/2) = exp(-i (pi/4) sz x sz).
pub fn c_phase_half() -> CMatrix {
    (kron(&sigma_z(), &sigma_z()) * c(0.0, -PI / 4.0)).exp()
}

/// CNOT (control qubit 1, target qubit 2), basis |00>, |01>, |10>, |11>.
pub fn cnot_canonical() -> CMatrix {
    let mut m = CMatrix::zeros(4, 4);
    for (r, col) in [(0, 0), (1, 1), (2, 3), (3, 2)] {
        m[(r, col)] = c(1.0, 0.0);
    }
    m
}

/// sqrt(Z1) sqrt(Z2)^dag sqrt(X2) C(pi/2) sqrt(Y2), checked against the
/// canonical CNOT up to a global phase.
pub fn cnot_ideal() -> Result<CMatrix> {
    let one = identity(2);
    let z1 = kron(&sqrt_pauli(&sigma_z()), &one);
    let z2d = kron(&one, &sqrt_pauli(&sigma_z()).adjoint());
    let x2 = kron(&one, &sqrt_pauli(&sigma_x()));
    let y2 = kron(&one, &sqrt_pauli(&sigma_y()));
    let u = z1 * z2d * x2 * c_phase_half() * y2;
    let inf = min_gate_infidelity(&cnot_canonical(), &u)?;
    if inf > 1e-12 {
        return Err(Error::Model(format!("CNOT decomposition off by {inf:e}")));
    }
    Ok(u)
}

/// Echo sequence X1X2 exp(-i H t/2) X2X1 exp(-i H t/2), t = t_CNOT = 1/(8 J),
/// with `h_full` a 4x4 E/h in Hz. With `x_gate_duration` > 0 each X layer is a
/// square pi pulse on both qubits applied on top of `h_full`.
pub fn spin_echo_cphase(h_full: &CMatrix, j_dip: f64, x_gate_duration: f64) -> Result<CMatrix> {
    if h_full.shape() != (4, 4) {
        return Err(Error::Input("spin echo needs a two-qubit (4x4) Hamiltonian".into()));
    }
    if !(j_dip.abs() > 0.0) || !j_dip.is_finite() {
        return Err(Error::Infeasible("J_dip = 0: the conditional phase never accumulates".into()));
    }
    if !(x_gate_duration >= 0.0) {
        return Err(Error::Input("x_gate_duration must be >= 0".into()));
    }
    let t = t_cnot(j_dip);
    let w = h_full * c(2.0 * PI, 0.0);
    let free = (&w * c(0.0, -t / 2.0)).exp();
    let xx = kron(&sigma_x(), &sigma_x());
    let x_layer = if x_gate_duration == 0.0 {
        xx
    } else {
        let one = identity(2);
        let drive = (kron(&sigma_x(), &one) + kron(&one, &sigma_x())) * c(PI / (2.0 * x_gate_duration), 0.0);
        ((w + drive) * c(0.0, -x_gate_duration)).exp()
    };
    Ok(&x_layer * &free * &x_layer * &free)
}

/// t_CNOT = pi hbar/(4 J) with J = h j_dip.
pub fn t_cnot(j_dip: f64) -> f64 {
    1.0 / (8.0 * j_dip.abs())
}

/// A perturbative bound plus a note when its premise fails.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundEstimate {
    pub fidelity: f64,
    pub warning: Option<String>,
}

impl BoundEstimate {
    pub fn infidelity(&self) -> f64 {
        1.0 - self.fidelity
    }
}

/// Single resonant residual V: F = 1 - (pi V/(4 J))^2.
pub fn fidelity_bound_resonant(v: f64, j_dip: f64) -> BoundEstimate {
    let x = PI * v / (4.0 * j_dip);
    let warning = (v.abs() >= 0.3 * j_dip.abs()).then(|| format!("V/J = {:.3} is not small: bound invalid", v / j_dip));
    BoundEstimate { fidelity: 1.0 - x * x, warning }
}

/// Off-resonant residual V across a gap delta: F = 1 - (2 V/delta)^2.
pub fn fidelity_bound_offresonant(v: f64, delta: f64) -> BoundEstimate {
    let x = 2.0 * v / delta;
    let warning = (v.abs() >= 0.3 * delta.abs()).then(|| format!("V/delta = {:.3} is not small: bound invalid", v / delta));
    BoundEstimate { fidelity: 1.0 - x * x, warning }
}

/// Largest transfer probability between two levels split by delta and coupled
/// by V: 4V^2/(delta^2 + 4V^2), from the exact 2x2 eigenproblem.
pub fn two_level_max_transfer(v: f64, delta: f64) -> f64 {
    4.0 * v * v / (delta * delta + 4.0 * v * v)
}

/// Energy scales entering the residual-error estimates, all E/h in Hz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeParams {
    pub j_dip: f64,
    pub a_j: f64,
    pub e_z: f64,
    pub e_zn: f64,
    pub delta_cf: f64,
    /// g_perp/g_par of the active doublet; 0 for an Ising doublet.
    pub g_perp_ratio: f64,
}

impl RegimeParams {
    /// Typical scales: J = mu0 mu_B^2/(4 pi r^3), E_Z = mu_B B, E_Zn = mu_N B.
    pub fn typical(r: f64, b: f64, a_j: f64, delta_cf: f64, g_perp_ratio: f64) -> Self {
        Self {
            j_dip: ising_coupling(MU_B, r, 1.0),
            a_j,
            e_z: MU_B * b / H,
            e_zn: MU_N * b / H,
            delta_cf,
            g_perp_ratio,
        }
    }

    pub fn validate(&self) -> Result<()> {
        crate::ion::EnergyHierarchy {
            j_dip: self.j_dip,
            hyperfine: self.a_j,
            zeeman: self.e_z,
            crystal_field: self.delta_cf,
        }
        .validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorChannel {
    Coherence,
    ActivationTime,
    ResidualResonant,
    ResidualOffresonant,
}

impl ErrorChannel {
    pub fn name(&self) -> &'static str {
        match self {
            ErrorChannel::Coherence => "coherence",
            ErrorChannel::ActivationTime => "activation_time",
            ErrorChannel::ResidualResonant => "residual_resonant",
            ErrorChannel::ResidualOffresonant => "residual_offresonant",
        }
    }
}

/// Dominant residual-interaction error of an encoding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualEstimate {
    pub error: f64,
    /// Which term of the max won.
    pub process: String,
    pub channel: ErrorChannel,
}

/// Perturbative residual error of the encodings:
/// g_perp = 0, electro-nuclear: max[(J/D)^2, (A/D)^4];
/// g_perp = 0, electronic: max[(J/D)^2, (A/D)^4 (J/max(J, E_Zn))^2];
/// g_perp > 0, electro-nuclear: max[(A/E_Z)^4, (J/A)^2];
/// g_perp > 0, electronic: resonant flip-flop, (g_perp/g_par)^2.
pub fn encoding_error_scaling(kind: EncodingKind, p: &RegimeParams) -> Result<ResidualEstimate> {
    p.validate()?;
    let (j, a, ez, ezn, d) = (p.j_dip.abs(), p.a_j.abs(), p.e_z.abs(), p.e_zn.abs(), p.delta_cf.abs());
    let pick = |terms: [(f64, &str, ErrorChannel); 2]| {
        let [x, y] = terms;
        let (e, name, ch) = if x.0 >= y.0 { x } else { y };
        ResidualEstimate { error: e, process: name.to_string(), channel: ch }
    };
    use ErrorChannel::*;
    Ok(if p.g_perp_ratio.abs() < 1e-12 {
        match kind {
            EncodingKind::ElectroNuclear => pick([
                ((j / d).powi(2), "cf_dipolar_admixture", ResidualOffresonant),
                ((a / d).powi(4), "cf_hyperfine_admixture", ResidualOffresonant),
            ]),
            EncodingKind::Electronic => pick([
                ((j / d).powi(2), "cf_dipolar_admixture", ResidualOffresonant),
                ((a / d).powi(4) * (j / j.max(ezn)).powi(2), "nuclear_flip_flop", ResidualOffresonant),
            ]),
        }
    } else {
        match kind {
            EncodingKind::ElectroNuclear => pick([
                ((a / ez).powi(4), "hyperfine_admixture", ResidualOffresonant),
                ((j / a).powi(2), "electro_nuclear_flip_flop", ResidualResonant),
            ]),
            EncodingKind::Electronic => ResidualEstimate {
                error: p.g_perp_ratio.powi(2).min(1.0),
                process: "electronic_flip_flop".into(),
                channel: ResidualResonant,
            },
        }
    })
}

/// Separation where (J/A)^2 = (A/E_Z)^4 for J = mu0 moment^2/(4 pi r^3 h).
pub fn flip_flop_crossover_radius(moment: f64, a_j: f64, e_z: f64) -> f64 {
    let j_target = a_j.powi(3) / (e_z * e_z);
    (ising_coupling(moment, 1.0, 1.0) / j_target).cbrt()
}

/// How the inter-ion vector is oriented relative to the moment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PairGeometry {
    /// Use the pair's r12 vector.
    AsGiven,
    /// r12 perpendicular to the moment (angular factor 1).
    #[default]
    Perpendicular,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CnotOptions {
    pub moment_model: MomentModel,
    pub geometry: PairGeometry,
    /// Deactivate the partner ion while an echo X acts on one ion.
    pub deactivate_during_x: bool,
}

impl Default for CnotOptions {
    fn default() -> Self {
        Self { moment_model: MomentModel::ZeemanSplitting, geometry: PairGeometry::Perpendicular, deactivate_during_x: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateReport {
    /// Activation + conditional evolution + deactivation, echo X gates instantaneous.
    pub total_time: f64,
    /// Same with the echo X gates as timed segments; None if X is infeasible.
    pub timed_total_time: Option<f64>,
    pub f_min: f64,
    pub total_error: f64,
    pub dominant_error: ErrorChannel,
    pub breakdown: Vec<(ErrorChannel, f64)>,
    pub residual_process: String,
    pub t_cnot: f64,
    pub t_act: f64,
    pub t_x: Option<f64>,
    /// t_X / t_act.
    pub x_over_activation: Option<f64>,
    /// Ising coupling, Hz.
    pub j_dip: f64,
    /// Moment entering J, J/T.
    pub moment: f64,
    /// Angle between ground and excited nuclear axes, rad.
    pub nuclear_axis_angle: f64,
}

/// Error budget of the CNOT: 1 - F >= max[t_CNOT/T2, (t_act/t_CNOT)^2, residual].
pub fn cnot_report(
    pair: &DipolePair,
    field: &FieldSpec,
    encoding: &QubitEncoding,
    drive: &OpticalDrive,
    t2: f64,
    opts: &CnotOptions,
) -> Result<GateReport> {
    if !(t2 > 0.0) {
        return Err(Error::Input("T2 must be positive".into()));
    }
    if !(drive.mu_e > 0.0 && drive.b_ac > 0.0) {
        return Err(Error::Input("drive needs mu_e > 0 and B_ac > 0".into()));
    }
    let ion = &pair.ion1;
    let b_hat: Vector3<f64> = field.direction();
    let moment = opts.moment_model.moment(&ion.g_excited, &b_hat)?;
    let j_dip = match opts.geometry {
        PairGeometry::AsGiven => ising_projection(pair, &ion.g_excited, field, opts.moment_model)?,
        PairGeometry::Perpendicular => {
            if !(moment > 1e-12 * MU_B) {
                return Err(Error::DegenerateEncoding("no moment along this field".into()));
            }
            ising_coupling(moment, pair.distance(), 1.0)
        }
    };
    if j_dip == 0.0 {
        return Err(Error::Infeasible("J_dip = 0 in this geometry".into()));
    }
    let t_c = t_cnot(j_dip);
    let act = activation_schedule(ion, field, drive, encoding)?;
    let t_act = act.total_duration();
    let t_x = active_x_schedule(ion, field, drive, encoding).ok().map(|s| s.total_duration());

    let p = ion.g_excited.principal();
    let regime = RegimeParams {
        j_dip,
        a_j: ion.a_j_excited,
        e_z: MU_B * ion.g_excited.spin_axis_vector(&b_hat).norm() * field.magnitude / H,
        e_zn: (ion.g_n * MU_N * field.magnitude / H).abs(),
        delta_cf: ion.delta_cf,
        g_perp_ratio: if p.values[0] > 0.0 { p.values[2] / p.values[0] } else { 0.0 },
    };
    let residual = encoding_error_scaling(encoding.kind, &regime)?;

    let limiting = if opts.deactivate_during_x { t_act } else { t_act.max(t_x.unwrap_or(f64::INFINITY)) };
    let breakdown = vec![
        (ErrorChannel::Coherence, t_c / t2),
        (ErrorChannel::ActivationTime, ((limiting / t_c).powi(2)).min(1.0)),
        (residual.channel, residual.error),
    ];
    let (dominant_error, total_error) = breakdown
        .iter()
        .copied()
        .fold((ErrorChannel::Coherence, 0.0), |acc, (ch, e)| if e > acc.1 { (ch, e) } else { acc });
    let total_error = total_error.min(1.0);

    let total_time = t_c + 2.0 * t_act;
    // two echo X layers; with deactivation each ion is flipped alone while the
    // partner is parked in its passive state
    let timed_total_time = t_x.map(|tx| {
        if opts.deactivate_during_x {
            total_time + 4.0 * (tx + 2.0 * t_act)
        } else {
            total_time + 2.0 * tx
        }
    });
    Ok(GateReport {
        total_time,
        timed_total_time,
        f_min: 1.0 - total_error,
        total_error,
        dominant_error,
        breakdown,
        residual_process: residual.process,
        t_cnot: t_c,
        t_act,
        t_x,
        x_over_activation: t_x.map(|tx| tx / t_act),
        j_dip,
        moment,
        nuclear_axis_angle: nuclear_axis_angle(ion, &b_hat)?,
    })
}

/// Moment-only convenience: J for a perpendicular pair.
pub fn perpendicular_coupling(ion: &IonSpec, field: &FieldSpec, r: f64) -> Result<f64> {
    Ok(ising_coupling(effective_moment(&ion.g_excited, &field.direction())?, r, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fidelity::min_gate_fidelity;
    use crate::ion::GTensor;
    use crate::matrix::max_abs;
    use crate::spin::AngularMomentum;

    #[test]
    fn cnot_identity() {
        let u = cnot_ideal().unwrap();
        assert!(1.0 - min_gate_fidelity(&cnot_canonical(), &u).unwrap() <= 1e-12);
    }

    #[test]
    fn echo_cancels_single_ion_terms() {
        let (a, b, j) = (3.7e5, -1.2e6, 2.9e4);
        let h = kron(&sigma_z(), &identity(2)) * c(a, 0.0)
            + kron(&identity(2), &sigma_z()) * c(b, 0.0)
            + kron(&sigma_z(), &sigma_z()) * c(j, 0.0);
        let u = spin_echo_cphase(&h, j, 0.0).unwrap();
        assert!(1.0 - min_gate_fidelity(&c_phase_half(), &u).unwrap() < 1e-10);
        assert!(spin_echo_cphase(&h, 0.0, 0.0).is_err());
    }

    #[test]
    fn timed_x_layers_reduce_to_ideal() {
        // a fast square pulse with no background is -i sx on each qubit
        let h = CMatrix::zeros(4, 4);
        let u = spin_echo_cphase(&(h + kron(&sigma_z(), &sigma_z()) * c(1e3, 0.0)), 1e3, 1e-12).unwrap();
        assert!(1.0 - min_gate_fidelity(&c_phase_half(), &u).unwrap() < 1e-8);
    }

    #[test]
    fn bound_arithmetic() {
        assert_eq!(fidelity_bound_resonant(0.0, 1.0).fidelity, 1.0);
        assert!((fidelity_bound_resonant(0.01, 1.0).infidelity() - 6.168_502_750_680_849e-5).abs() < 1e-15);
        assert!((fidelity_bound_offresonant(0.01, 1.0).infidelity() - 4e-4).abs() < 1e-15);
        assert!(fidelity_bound_resonant(0.5, 1.0).warning.is_some());
    }

    #[test]
    fn section_three_times() {
        let t = x_gate_time_estimate(1e-3);
        assert!((t - 3.0 * HBAR / (MU_B * 1e-3)).abs() < 1e-24);
        assert!((t * 1e9 - 34.1).abs() < 0.05);
        assert!((direct_nuclear_time(1e-3) * 1e6 - 20.9).abs() < 0.05);
    }

    fn half_spin_ion(axis_angle: f64) -> IonSpec {
        // I = 1/2, ground axis along z, excited axis tilted in the xz plane
        let gg = GTensor::axial(6.0, 0.5, Vector3::z()).unwrap();
        let ge = GTensor::axial(6.0, 0.5, Vector3::new(axis_angle.sin(), 0.0, axis_angle.cos())).unwrap();
        IonSpec {
            j_ground: 7.5,
            j_excited: 6.5,
            nuclear_spin: 0.5,
            a_j_ground: 1e9,
            a_j_excited: 1e9,
            g_j_ground: 1.2,
            g_j_excited: 72.0 / 65.0,
            g_ground: gg,
            g_excited: ge,
            g_n: 0.0,
            delta_j: 1e14,
            delta_cf: 1e11,
            mu_e_transition: 2e-32,
            t2_excited: 1e-3,
        }
    }

    #[test]
    fn x_schedule_three_pulses() {
        // the field bisects the two easy axes; pick the tilt that makes the
        // nuclear axes exactly perpendicular
        let ion = half_spin_ion(PI / 2.0);
        let f = FieldSpec::new(1.0, PI / 4.0, 0.0).unwrap();
        let beta = nuclear_axis_angle(&ion, &f.direction()).unwrap();
        let s = x_gate_schedule(&ion, &f, 1e-3).unwrap();
        assert_eq!(s.pulses().count(), 3);
        s.validate(ion.doublet_dim()).unwrap();
        let (cb, sb) = ((beta / 2.0).cos(), (beta / 2.0).sin());
        let want = HBAR / (MU_B * 1e-3) * (2.0 / cb.max(sb) + 1.0 / cb.min(sb));
        assert!((s.total_duration() / want - 1.0).abs() < 1e-9);
    }

    #[test]
    fn x_schedule_parallel_axes_infeasible() {
        let ion = half_spin_ion(0.0);
        let f = FieldSpec::new(1.0, 0.3, 0.2).unwrap();
        assert!(matches!(x_gate_schedule(&ion, &f, 1e-3), Err(Error::Infeasible(_))));
    }

    #[test]
    fn residual_scaling_branches() {
        let p = RegimeParams::typical(10e-9, 1.0, 1e9, 1e11, 0.0);
        let e = encoding_error_scaling(EncodingKind::Electronic, &p).unwrap();
        assert!(e.error > 1e-15 && e.error < 1e-13, "{e:?}");
        let q = RegimeParams { g_perp_ratio: 0.5, ..p };
        let en = encoding_error_scaling(EncodingKind::ElectroNuclear, &q).unwrap();
        assert!(en.error > 1e-6 && en.error < 1e-4, "{en:?}");
        let el = encoding_error_scaling(EncodingKind::Electronic, &q).unwrap();
        assert_eq!(el.channel, ErrorChannel::ResidualResonant);
        let bad = RegimeParams { e_z: 1e12, ..p };
        assert!(matches!(encoding_error_scaling(EncodingKind::Electronic, &bad), Err(Error::Regime(_))));
    }

    #[test]
    fn crossover_radius_near_1_3_nm() {
        let r = flip_flop_crossover_radius(MU_B, 1e9, MU_B * 1.0 / H);
        assert!((r / 1.3e-9 - 1.0).abs() < 0.2, "{r}");
    }

    #[test]
    fn electro_nuclear_encoding_levels() {
        let e = QubitEncoding::standard(EncodingKind::ElectroNuclear, AngularMomentum::new(0.5).unwrap()).unwrap();
        assert_eq!(e.active, [0, 2]);
        assert!(max_abs(&(cnot_canonical() * cnot_canonical() - identity(4))) < 1e-15);
    }
}
