//! Single-ion and pair Hamiltonians for Kramers rare-earth ions.
//!
//! Each crystal-field doublet is an effective spin-1/2 (Pauli operators sigma)
//! with a g-tensor; the nuclear spin I lives in the right Kronecker factor.
//! Energies are returned as E/h in Hz. Inside a doublet the electronic angular
//! momentum maps to J_a = sum_b g_ab sigma_b / (2 g_J), which fixes both the
//! hyperfine term and the dipolar coupling.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::constants::{H, MU_0, MU_B, MU_N, EPS_0, HBAR};
use crate::error::{Error, Result};
use crate::matrix::{c, eigh, identity, kron, paulis, CMatrix};
use crate::spin::{wigner_small_d, AngularMomentum};

/// g-matrix coupling field to pseudospin: H = (mu_B/2) B . g . sigma.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GTensor {
    pub matrix: Matrix3<f64>,
}

/// Principal values (descending) and the matching unit axes as columns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrincipalForm {
    pub values: [f64; 3],
    pub axes: Matrix3<f64>,
}

impl GTensor {
    pub fn from_matrix(matrix: Matrix3<f64>) -> Self {
        Self { matrix }
    }

    pub fn from_rows(rows: [[f64; 3]; 3]) -> Self {
        Self { matrix: Matrix3::from_fn(|i, j| rows[i][j]) }
    }

    pub fn isotropic(g: f64) -> Self {
        Self { matrix: Matrix3::identity() * g }
    }

    /// Axial tensor g_perp 1 + (g_par - g_perp) a a^T.
    pub fn axial(g_par: f64, g_perp: f64, axis: Vector3<f64>) -> Result<Self> {
        let n = axis.norm();
        if !(n > 0.0) {
            return Err(Error::Input("g-tensor axis must be non-zero".into()));
        }
        let a = axis / n;
        Ok(Self { matrix: Matrix3::identity() * g_perp + a * a.transpose() * (g_par - g_perp) })
    }

    pub fn is_symmetric(&self) -> bool {
        (self.matrix - self.matrix.transpose()).abs().max() < 1e-12 * self.matrix.abs().max().max(1.0)
    }

    /// Singular-value form; for symmetric positive tensors these are the
    /// principal g-values and axes.
    pub fn principal(&self) -> PrincipalForm {
        let svd = self.matrix.svd(true, false);
        let u = svd.u.expect("u requested");
        let mut idx = [0usize, 1, 2];
        idx.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
        let values = [svd.singular_values[idx[0]], svd.singular_values[idx[1]], svd.singular_values[idx[2]]];
        let mut axes = Matrix3::zeros();
        for (col, &k) in idx.iter().enumerate() {
            axes.set_column(col, &u.column(k));
        }
        PrincipalForm { values, axes }
    }

    /// Axial description (g_par, g_perp, axis) taking the largest principal value
    /// as g_par and the mean of the other two as g_perp.
    pub fn axial_form(&self) -> (f64, f64, Vector3<f64>) {
        let p = self.principal();
        (p.values[0], 0.5 * (p.values[1] + p.values[2]), p.axes.column(0).into_owned())
    }

    /// g^T b, the direction the pseudospin quantizes along.
    pub fn spin_axis_vector(&self, b_hat: &Vector3<f64>) -> Vector3<f64> {
        self.matrix.transpose() * b_hat
    }

    /// g g^T b: direction of the moment (and of the hyperfine field).
    pub fn moment_vector(&self, b_hat: &Vector3<f64>) -> Vector3<f64> {
        let n = self.spin_axis_vector(b_hat);
        let nn = n.norm();
        if nn == 0.0 {
            return Vector3::zeros();
        }
        self.matrix * (n / nn)
    }
}

/// Which doublet of the ion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Manifold {
    Ground,
    Excited,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IonSpec {
    pub j_ground: f64,
    pub j_excited: f64,
    pub nuclear_spin: f64,
    /// Hyperfine constant A_J/h, Hz.
    pub a_j_ground: f64,
    pub a_j_excited: f64,
    /// Lande factors of the two J manifolds.
    pub g_j_ground: f64,
    pub g_j_excited: f64,
    pub g_ground: GTensor,
    pub g_excited: GTensor,
    pub g_n: f64,
    /// Gap between J manifolds / h, Hz.
    pub delta_j: f64,
    /// Gap to the dominant admixed crystal-field state / h, Hz.
    pub delta_cf: f64,
    /// Optical transition dipole, C m.
    pub mu_e_transition: f64,
    /// Coherence time of the excited doublet, s.
    pub t2_excited: f64,
}

impl IonSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("j_ground", self.j_ground), ("j_excited", self.j_excited), ("nuclear_spin", self.nuclear_spin)] {
            AngularMomentum::new(v).map_err(|_| Error::Input(format!("{name} = {v} is not a half-integer")))?;
        }
        for (name, v) in [("delta_j", self.delta_j), ("delta_cf", self.delta_cf), ("t2_excited", self.t2_excited)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Input(format!("{name} must be positive (got {v})")));
            }
        }
        for (name, v) in [("g_j_ground", self.g_j_ground), ("g_j_excited", self.g_j_excited)] {
            if !(v > 0.0) {
                return Err(Error::Input(format!("{name} must be positive (got {v})")));
            }
        }
        if !(self.mu_e_transition >= 0.0) {
            return Err(Error::Input("mu_e_transition must be non-negative".into()));
        }
        Ok(())
    }

    /// Kramers check: half-odd J in both manifolds.
    pub fn check_kramers(&self) -> Result<()> {
        for (name, j) in [("ground", self.j_ground), ("excited", self.j_excited)] {
            let am = AngularMomentum::new(j)?;
            if !am.is_half_odd() {
                return Err(Error::Model(format!("{name} J = {j} is integer: not a Kramers ion")));
            }
        }
        Ok(())
    }

    pub fn g(&self, m: Manifold) -> &GTensor {
        match m {
            Manifold::Ground => &self.g_ground,
            Manifold::Excited => &self.g_excited,
        }
    }

    pub fn a_j(&self, m: Manifold) -> f64 {
        match m {
            Manifold::Ground => self.a_j_ground,
            Manifold::Excited => self.a_j_excited,
        }
    }

    pub fn g_j(&self, m: Manifold) -> f64 {
        match m {
            Manifold::Ground => self.g_j_ground,
            Manifold::Excited => self.g_j_excited,
        }
    }

    pub fn nuclear(&self) -> AngularMomentum {
        AngularMomentum::new(self.nuclear_spin).expect("validated")
    }

    /// Dimension of one doublet times the nuclear space.
    pub fn doublet_dim(&self) -> usize {
        2 * self.nuclear().dim()
    }
}

/// Static field: magnitude (T) and direction (polar theta from the crystal z
/// axis, azimuth phi from x, both in radians).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub magnitude: f64,
    pub theta: f64,
    pub phi: f64,
}

impl FieldSpec {
    pub fn new(magnitude: f64, theta: f64, phi: f64) -> Result<Self> {
        if !(magnitude >= 0.0) || !magnitude.is_finite() || !theta.is_finite() || !phi.is_finite() {
            return Err(Error::Input("field needs finite magnitude >= 0 and finite angles".into()));
        }
        Ok(Self::normalized(magnitude, theta, phi))
    }

    /// Angles folded into [0, pi] x [0, 2 pi).
    fn normalized(magnitude: f64, theta: f64, phi: f64) -> Self {
        let mut th = theta.rem_euclid(2.0 * PI);
        let mut ph = phi;
        if th > PI {
            th = 2.0 * PI - th;
            ph += PI;
        }
        Self { magnitude, theta: th, phi: ph.rem_euclid(2.0 * PI) }
    }

    pub fn from_degrees(magnitude: f64, theta_deg: f64, phi_deg: f64) -> Result<Self> {
        Self::new(magnitude, theta_deg.to_radians(), phi_deg.to_radians())
    }

    pub fn direction(&self) -> Vector3<f64> {
        direction(self.theta, self.phi)
    }

    pub fn vector(&self) -> Vector3<f64> {
        self.direction() * self.magnitude
    }
}

pub fn direction(theta: f64, phi: f64) -> Vector3<f64> {
    Vector3::new(theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos())
}

/// Pseudospin and nuclear operators embedded in the doublet x nucleus space.
struct DoubletOps {
    sigma: [CMatrix; 3],
    nuc: [CMatrix; 3],
}

fn doublet_ops(i: AngularMomentum) -> DoubletOps {
    let (ix, iy, iz) = i.ops();
    let one_n = identity(i.dim());
    let one_e = identity(2);
    let p = paulis();
    DoubletOps {
        sigma: [kron(&p[0], &one_n), kron(&p[1], &one_n), kron(&p[2], &one_n)],
        nuc: [kron(&one_e, &ix), kron(&one_e, &iy), kron(&one_e, &iz)],
    }
}

/// J_a = sum_b g_ab sigma_b / (2 g_J) on the doublet space.
fn projected_j(ops: &DoubletOps, g: &GTensor, g_j: f64) -> [CMatrix; 3] {
    let n = ops.sigma[0].nrows();
    std::array::from_fn(|a| {
        let mut m = CMatrix::zeros(n, n);
        for b in 0..3 {
            m += &ops.sigma[b] * c(g.matrix[(a, b)] / (2.0 * g_j), 0.0);
        }
        m
    })
}

/// Doublet Hamiltonian E/h (Hz): electronic Zeeman, nuclear Zeeman and the
/// projected hyperfine contact term.
pub fn single_ion_hamiltonian(ion: &IonSpec, manifold: Manifold, field: &FieldSpec) -> Result<CMatrix> {
    ion.validate()?;
    ion.check_kramers()?;
    let ops = doublet_ops(ion.nuclear());
    let b = field.vector();
    let g = ion.g(manifold);
    let gtb = g.spin_axis_vector(&b);
    let n = ion.doublet_dim();
    let mut h = CMatrix::zeros(n, n);
    for a in 0..3 {
        h += &ops.sigma[a] * c(MU_B / (2.0 * H) * gtb[a], 0.0);
        h -= &ops.nuc[a] * c(ion.g_n * MU_N / H * b[a], 0.0);
    }
    let j = projected_j(&ops, g, ion.g_j(manifold));
    for a in 0..3 {
        h += &ops.nuc[a] * &j[a] * c(ion.a_j(manifold), 0.0);
    }
    Ok(h)
}

/// Zeeman moment (mu_B/2)|g^T b| in J/T: half the splitting per unit field.
pub fn effective_moment(g: &GTensor, field_direction: &Vector3<f64>) -> Result<f64> {
    let n = field_direction.norm();
    if (n - 1.0).abs() > 1e-9 {
        return Err(Error::Input(format!("field direction must be a unit vector (norm {n})")));
    }
    Ok(MU_B / 2.0 * g.spin_axis_vector(field_direction).norm())
}

/// Expectation value of the moment operator in a Zeeman eigenstate, J/T:
/// (mu_B/2)|g n| with n = g^T b/|g^T b|.
pub fn expectation_moment(g: &GTensor, field_direction: &Vector3<f64>) -> f64 {
    MU_B / 2.0 * g.moment_vector(field_direction).norm()
}

/// How the scalar moment entering the Ising coupling is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum MomentModel {
    /// (mu_B/2)|g^T b|, from the Zeeman splitting.
    #[default]
    ZeemanSplitting,
    /// (mu_B/2)|g g^T b|/|g^T b|, the moment expectation value; agrees with
    /// projecting the full pair Hamiltonian.
    Expectation,
}

impl MomentModel {
    pub fn moment(&self, g: &GTensor, b_hat: &Vector3<f64>) -> Result<f64> {
        match self {
            MomentModel::ZeemanSplitting => effective_moment(g, b_hat),
            MomentModel::Expectation => Ok(expectation_moment(g, b_hat)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DipolePair {
    pub ion1: IonSpec,
    pub ion2: IonSpec,
    /// Separation vector, m.
    pub r12: Vector3<f64>,
}

impl DipolePair {
    pub fn new(ion1: IonSpec, ion2: IonSpec, r12: Vector3<f64>) -> Result<Self> {
        if !(r12.norm() > 0.0) {
            return Err(Error::Input("ions must be separated (|r12| > 0)".into()));
        }
        Ok(Self { ion1, ion2, r12 })
    }

    pub fn identical(ion: IonSpec, r12: Vector3<f64>) -> Result<Self> {
        Self::new(ion.clone(), ion, r12)
    }

    pub fn distance(&self) -> f64 {
        self.r12.norm()
    }
}

/// J^{ab} = mu0 (mu_B g_J)^2/(4 pi r^3) (delta_ab - 3 r_a r_b), as E/h in Hz,
/// for both ions in their excited manifolds.
pub fn dipolar_coupling_tensor(pair: &DipolePair) -> Result<Matrix3<f64>> {
    let r = pair.distance();
    if !(r > 0.0) {
        return Err(Error::Input("zero separation".into()));
    }
    let rh = pair.r12 / r;
    let pref = MU_0 * MU_B * MU_B * pair.ion1.g_j_excited * pair.ion2.g_j_excited / (4.0 * PI * r.powi(3) * H);
    Ok((Matrix3::identity() - rh * rh.transpose() * 3.0) * pref)
}

/// Ising coupling J (E/h, Hz) between the active doublets:
/// mu0 mu_m^2/(4 pi r^3) (1 - 3 (r.m)^2) with m along g g^T b.
pub fn ising_projection(pair: &DipolePair, g_excited: &GTensor, field: &FieldSpec, model: MomentModel) -> Result<f64> {
    let b = field.direction();
    let mu = model.moment(g_excited, &b)?;
    let m = g_excited.moment_vector(&b);
    let scale = MU_B / 2.0 * g_excited.matrix.abs().max();
    if !(mu > 1e-12 * scale) || m.norm() == 0.0 {
        return Err(Error::DegenerateEncoding("g^T b = 0: no moment along this field".into()));
    }
    let r = pair.distance();
    let cos = pair.r12.dot(&m) / (r * m.norm());
    Ok(ising_coupling(mu, r, 1.0 - 3.0 * cos * cos))
}

/// mu0 mu^2 angular/(4 pi r^3 h), Hz.
pub fn ising_coupling(moment: f64, r: f64, angular: f64) -> f64 {
    MU_0 * moment * moment * angular / (4.0 * PI * r.powi(3) * H)
}

/// Electric dipole frequency shift dmu^2/(4 pi eps0 hbar r^3), rad/s.
pub fn electric_dipole_shift(delta_mu_e: f64, r: f64) -> f64 {
    delta_mu_e * delta_mu_e / (4.0 * PI * EPS_0 * HBAR * r.powi(3))
}

/// Which levels carry the qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EncodingKind {
    ElectroNuclear,
    Electronic,
}

/// Level indices (energy order, ascending) inside each doublet spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QubitEncoding {
    pub kind: EncodingKind,
    pub passive: [usize; 2],
    pub active: [usize; 2],
}

impl QubitEncoding {
    /// Passive |down, -I>, |down, -I+1>; active |0> = |down, -I> (lowest),
    /// |1> = |up, -I+1> (second highest) or |up, -I> (highest) for the
    /// electronic encoding.
    pub fn standard(kind: EncodingKind, nuclear: AngularMomentum) -> Result<Self> {
        let n = 2 * nuclear.dim();
        if n < 4 {
            return Err(Error::Input("need at least 4 doublet levels".into()));
        }
        let active1 = match kind {
            EncodingKind::ElectroNuclear => n - 2,
            EncodingKind::Electronic => n - 1,
        };
        let e = Self { kind, passive: [0, 1], active: [0, active1] };
        e.validate(n)?;
        Ok(e)
    }

    pub fn validate(&self, doublet_dim: usize) -> Result<()> {
        let all = [self.passive[0], self.passive[1], self.active[0], self.active[1]];
        if all.iter().any(|&k| k >= doublet_dim) {
            return Err(Error::Input("encoding level index out of range".into()));
        }
        if self.passive[0] == self.passive[1] || self.active[0] == self.active[1] {
            return Err(Error::Input("encoding levels must be distinct".into()));
        }
        if self.active[0] != 0 {
            return Err(Error::Input("active |0> must be the lowest excited-doublet level".into()));
        }
        Ok(())
    }
}

/// Labels of a doublet level in the strong-field limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelLabel {
    /// +1 for the upper Zeeman branch, -1 for the lower.
    pub branch: i8,
    /// Nuclear projection along the local hyperfine-field axis chosen so the
    /// lowest level is m = -I.
    pub m: f64,
}

/// Strong-field labels by energy rank; valid for E_Z >> A_J with A_J > 0
/// (reversed nuclear order for A_J < 0).
pub fn level_labels(nuclear: AngularMomentum, a_j: f64) -> Vec<LevelLabel> {
    let d = nuclear.dim();
    let i = nuclear.j();
    let mut out = Vec::with_capacity(2 * d);
    for k in 0..d {
        let m = if a_j >= 0.0 { -i + k as f64 } else { i - k as f64 };
        out.push(LevelLabel { branch: -1, m });
    }
    for k in 0..d {
        // upper branch ranks from the top
        let rank_from_top = d - 1 - k;
        let m = if a_j >= 0.0 { -i + rank_from_top as f64 } else { i - rank_from_top as f64 };
        out.push(LevelLabel { branch: 1, m });
    }
    out
}

/// Angle between the nuclear quantization axes (hyperfine-field directions
/// g g^T b) of the ground and excited doublets, in [0, pi/2].
pub fn nuclear_axis_angle(ion: &IonSpec, b_hat: &Vector3<f64>) -> Result<f64> {
    let mg = ion.g_ground.moment_vector(b_hat);
    let me = ion.g_excited.moment_vector(b_hat);
    if mg.norm() == 0.0 || me.norm() == 0.0 {
        return Err(Error::DegenerateEncoding("vanishing moment in one doublet".into()));
    }
    let cos = (mg.dot(&me) / (mg.norm() * me.norm())).clamp(-1.0, 1.0);
    Ok(cos.acos())
}

/// Overlap <m'|m> of nuclear states quantized along axes at angle beta.
pub fn nuclear_overlap(nuclear: AngularMomentum, m_to: f64, m_from: f64, beta: f64) -> f64 {
    wigner_small_d(nuclear.j(), m_to, m_from, beta)
}

/// Pair Hamiltonian (E/h, Hz) for both ions in their excited doublets:
/// H1 x 1 + 1 x H2 + sum_ab J^{ab} J1_a J2_b.
pub fn two_ion_hamiltonian(pair: &DipolePair, field: &FieldSpec, encoding: &QubitEncoding) -> Result<CMatrix> {
    let h1 = single_ion_hamiltonian(&pair.ion1, Manifold::Excited, field)?;
    let h2 = single_ion_hamiltonian(&pair.ion2, Manifold::Excited, field)?;
    encoding.validate(h1.nrows())?;
    encoding.validate(h2.nrows())?;
    let (n1, n2) = (h1.nrows(), h2.nrows());
    let mut h = kron(&h1, &identity(n2)) + kron(&identity(n1), &h2);
    h += interaction_term(pair)?;
    Ok(h)
}

/// Dipolar part of [`two_ion_hamiltonian`] alone.
pub fn interaction_term(pair: &DipolePair) -> Result<CMatrix> {
    let jt = dipolar_coupling_tensor(pair)?;
    let o1 = doublet_ops(pair.ion1.nuclear());
    let o2 = doublet_ops(pair.ion2.nuclear());
    let j1 = projected_j(&o1, &pair.ion1.g_excited, pair.ion1.g_j_excited);
    let j2 = projected_j(&o2, &pair.ion2.g_excited, pair.ion2.g_j_excited);
    let n = j1[0].nrows() * j2[0].nrows();
    let mut h = CMatrix::zeros(n, n);
    for a in 0..3 {
        for b in 0..3 {
            if jt[(a, b)] != 0.0 {
                h += kron(&j1[a], &j2[b]) * c(jt[(a, b)], 0.0);
            }
        }
    }
    Ok(h)
}

/// Effective zz coupling read off the full pair Hamiltonian:
/// (E00 - E01 - E10 + E11)/4 of the interaction term in product qubit states.
pub fn projected_ising_coupling(pair: &DipolePair, field: &FieldSpec, encoding: &QubitEncoding) -> Result<f64> {
    let h1 = single_ion_hamiltonian(&pair.ion1, Manifold::Excited, field)?;
    let h2 = single_ion_hamiltonian(&pair.ion2, Manifold::Excited, field)?;
    let (_, v1) = eigh(&h1);
    let (_, v2) = eigh(&h2);
    let hint = interaction_term(pair)?;
    let mut e = [[0.0; 2]; 2];
    for (a, &ka) in encoding.active.iter().enumerate() {
        for (b, &kb) in encoding.active.iter().enumerate() {
            let psi = v1.column(ka).kronecker(&v2.column(kb));
            e[a][b] = psi.dotc(&(&hint * &psi)).re;
        }
    }
    Ok((e[0][0] - e[0][1] - e[1][0] + e[1][1]) / 4.0)
}

/// Energy scales for the hierarchy check, all as E/h in Hz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyHierarchy {
    pub j_dip: f64,
    pub hyperfine: f64,
    pub zeeman: f64,
    pub crystal_field: f64,
}

impl EnergyHierarchy {
    /// Names the first violated inequality of J_dip < A_J < E_Z < Delta_CF.
    pub fn validate(&self) -> Result<()> {
        let chain = [
            ("J_dip", self.j_dip.abs()),
            ("A_J", self.hyperfine.abs()),
            ("E_Z", self.zeeman.abs()),
            ("Delta_CF", self.crystal_field.abs()),
        ];
        for w in chain.windows(2) {
            if !(w[0].1 < w[1].1) {
                return Err(Error::Regime(format!(
                    "{} < {} violated ({:.3e} Hz vs {:.3e} Hz)",
                    w[0].0, w[1].0, w[0].1, w[1].1
                )));
            }
        }
        Ok(())
    }
}

/// Hierarchy for an ion pair in a field; E_Z = mu_B B (the scale of the
/// electronic Zeeman energy).
pub fn energy_hierarchy(ion: &IonSpec, j_dip_hz: f64, b: f64) -> EnergyHierarchy {
    EnergyHierarchy { j_dip: j_dip_hz, hyperfine: ion.a_j_excited, zeeman: MU_B * b / H, crystal_field: ion.delta_cf }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{eigvalsh, hermiticity_defect};

    pub(crate) fn toy_ion(i: f64, a: f64, g: GTensor) -> IonSpec {
        IonSpec {
            j_ground: 7.5,
            j_excited: 6.5,
            nuclear_spin: i,
            a_j_ground: a,
            a_j_excited: a,
            g_j_ground: 1.2,
            g_j_excited: 72.0 / 65.0,
            g_ground: g,
            g_excited: g,
            g_n: -0.16,
            delta_j: 195e12,
            delta_cf: 1e11,
            mu_e_transition: 2e-32,
            t2_excited: 4.4e-3,
        }
    }

    #[test]
    fn axial_zeeman_closed_form() {
        let g = GTensor::axial(8.0, 0.0, Vector3::z()).unwrap();
        let mut ion = toy_ion(1.5, 0.0, g);
        ion.g_n = 0.0;
        let f = FieldSpec::new(0.5, 0.0, 0.0).unwrap();
        let h = single_ion_hamiltonian(&ion, Manifold::Ground, &f).unwrap();
        assert!(hermiticity_defect(&h) < 1e-3);
        let ev = eigvalsh(&h);
        let e = MU_B * 8.0 * 0.5 / (2.0 * H);
        for (k, v) in ev.iter().enumerate() {
            let want = if k < 4 { -e } else { e };
            assert!((v - want).abs() < 1e-9 * e);
        }
    }

    #[test]
    fn integer_j_rejected() {
        let mut ion = toy_ion(0.5, 1e8, GTensor::isotropic(2.0));
        ion.j_ground = 4.0;
        let f = FieldSpec::new(0.1, 0.0, 0.0).unwrap();
        assert!(matches!(single_ion_hamiltonian(&ion, Manifold::Ground, &f), Err(Error::Model(_))));
    }

    #[test]
    fn field_angles_fold() {
        let f = FieldSpec::new(1.0, -0.3, 7.0).unwrap();
        assert!((0.0..=PI).contains(&f.theta) && (0.0..2.0 * PI).contains(&f.phi));
        let g = FieldSpec::new(1.0, 0.3, 7.0 + PI).unwrap();
        assert!((f.direction() - g.direction()).norm() < 1e-12);
    }

    #[test]
    fn moment_examples() {
        // unique axis along x so the polar-angle formula has g_par at theta = pi/2
        let g = GTensor::axial(2.0, 0.0, Vector3::x()).unwrap();
        let mu = effective_moment(&g, &direction(PI / 2.0, 0.0)).unwrap();
        assert!((mu - MU_B).abs() < 1e-12 * MU_B);
        let iso = GTensor::isotropic(3.3);
        for &(t, p) in &[(0.1, 0.2), (1.0, 4.0), (2.5, 1.0)] {
            let mu = effective_moment(&iso, &direction(t, p)).unwrap();
            assert!((mu - 3.3 * MU_B / 2.0).abs() < 1e-12 * MU_B);
        }
        assert!(effective_moment(&iso, &Vector3::new(1.0, 1.0, 0.0)).is_err());
    }

    #[test]
    fn dipolar_tensor_along_z() {
        let ion = toy_ion(0.5, 0.0, GTensor::isotropic(2.0));
        let r = 10e-9;
        let pair = DipolePair::identical(ion.clone(), Vector3::new(0.0, 0.0, r)).unwrap();
        let jt = dipolar_coupling_tensor(&pair).unwrap();
        let pref = MU_0 * (MU_B * ion.g_j_excited).powi(2) / (4.0 * PI * r.powi(3) * H);
        let want = Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, -2.0)) * pref;
        assert!((jt - want).abs().max() < 1e-12 * pref);
        assert!(DipolePair::identical(ion, Vector3::zeros()).is_err());
    }

    #[test]
    fn electric_analog_shift() {
        let w = electric_dipole_shift(7.7e-32, 10e-9);
        assert!((w / (2.0 * PI * 80e3) - 1.0).abs() < 0.05);
    }

    #[test]
    fn magnetic_electric_equivalence() {
        let mu = 2.5 * MU_B;
        let mag = MU_0 * mu * mu;
        let ele = 7.7e-32f64.powi(2) / EPS_0;
        assert!((mag / ele - 1.0).abs() < 0.05);
    }

    #[test]
    fn ising_angular_factors() {
        let g = GTensor::axial(8.0, 0.0, Vector3::z()).unwrap();
        let ion = toy_ion(0.5, 0.0, g);
        let f = FieldSpec::new(1.0, 0.0, 0.0).unwrap();
        let r = 10e-9;
        let perp = DipolePair::identical(ion.clone(), Vector3::new(r, 0.0, 0.0)).unwrap();
        let j = ising_projection(&perp, &ion.g_excited, &f, MomentModel::ZeemanSplitting).unwrap();
        assert!((j - ising_coupling(4.0 * MU_B, r, 1.0)).abs() < 1e-12 * j);
        let c = 1.0 / 3f64.sqrt();
        let s = (1.0 - c * c).sqrt();
        let magic = DipolePair::identical(ion.clone(), Vector3::new(s * r, 0.0, c * r)).unwrap();
        let j0 = ising_projection(&magic, &ion.g_excited, &f, MomentModel::ZeemanSplitting).unwrap();
        assert!(j0.abs() < 1e-12 * j);
        let f_perp = FieldSpec::new(1.0, PI / 2.0, 0.0).unwrap();
        assert!(matches!(
            ising_projection(&perp, &ion.g_excited, &f_perp, MomentModel::ZeemanSplitting),
            Err(Error::DegenerateEncoding(_))
        ));
    }

    #[test]
    fn encodings() {
        let i = AngularMomentum::new(3.5).unwrap();
        let e = QubitEncoding::standard(EncodingKind::ElectroNuclear, i).unwrap();
        assert_eq!(e.active, [0, 14]);
        let labels = level_labels(i, 1e8);
        assert_eq!((labels[0].branch, labels[0].m), (-1, -3.5));
        assert_eq!((labels[14].branch, labels[14].m), (1, -2.5));
        assert_eq!((labels[15].branch, labels[15].m), (1, -3.5));
        let bad = QubitEncoding { kind: EncodingKind::Electronic, passive: [0, 0], active: [0, 1] };
        assert!(bad.validate(16).is_err());
    }

    #[test]
    fn hierarchy_names_violation() {
        let h = EnergyHierarchy { j_dip: 1e4, hyperfine: 1e8, zeeman: 1e7, crystal_field: 1e11 };
        match h.validate() {
            Err(Error::Regime(m)) => assert!(m.contains("A_J < E_Z")),
            other => panic!("{other:?}"),
        }
    }
}
