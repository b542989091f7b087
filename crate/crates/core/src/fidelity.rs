//! Minimal gate fidelity.
//!
//! For unitary M = U_ideal^dag U_exp the numerical range is the convex hull of
//! its eigenvalues, all on the unit circle. The worst-case overlap is the squared
//! distance from the origin to that hull. With eigenphases spanning an arc of
//! width w (the complement of the largest gap), the nearest hull point is the
//! chord midpoint at distance cos(w/2); if w >= pi the hull contains the origin.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::matrix::{c, check_unitary, CMatrix, C64};

/// Tolerance on unitarity of inputs.
pub const UNITARY_TOL: f64 = 1e-6;

/// Eigenvalues of a normal matrix via the commuting Hermitian pair.
pub fn normal_eigenvalues(m: &CMatrix) -> Vec<C64> {
    let n = m.nrows();
    if n == 1 {
        return vec![m[(0, 0)]];
    }
    let md = m.adjoint();
    let re = (m + &md) * c(0.5, 0.0);
    let im = (m - &md) * c(0.0, -0.5);
    // generic mixing weight so accidental degeneracies are unlikely
    let comb = re + im * c(0.618_033_988_749_894_9, 0.0);
    let eig = comb.symmetric_eigen();
    (0..n)
        .map(|k| {
            let v = eig.eigenvectors.column(k);
            let mv = m * v;
            v.dotc(&mv)
        })
        .collect()
}

/// Angular width of the smallest arc containing all phases.
pub fn arc_width(phases: &[f64]) -> f64 {
    if phases.len() <= 1 {
        return 0.0;
    }
    let mut p: Vec<f64> = phases.iter().map(|x| x.rem_euclid(2.0 * PI)).collect();
    p.sort_by(f64::total_cmp);
    let mut max_gap = p[0] + 2.0 * PI - p[p.len() - 1];
    for w in p.windows(2) {
        max_gap = max_gap.max(w[1] - w[0]);
    }
    (2.0 * PI - max_gap).max(0.0)
}

/// 1 - F_min, computed without cancellation.
pub fn min_gate_infidelity(u_ideal: &CMatrix, u_exp: &CMatrix) -> Result<f64> {
    if u_ideal.shape() != u_exp.shape() {
        return Err(Error::Input("min_gate_fidelity: dimension mismatch".into()));
    }
    check_unitary(u_ideal, UNITARY_TOL, "u_ideal")?;
    check_unitary(u_exp, UNITARY_TOL, "u_exp")?;
    let m = u_ideal.adjoint() * u_exp;
    let phases: Vec<f64> = normal_eigenvalues(&m).iter().map(|z| z.arg()).collect();
    Ok(infidelity_from_arc(arc_width(&phases)))
}

/// Worst-case infidelity for eigenphases spanning an arc of width w.
pub fn infidelity_from_arc(w: f64) -> f64 {
    if w >= PI {
        1.0
    } else {
        (w / 2.0).sin().powi(2)
    }
}

/// min over pure states of |<psi| U_ideal^dag U_exp |psi>|^2.
pub fn min_gate_fidelity(u_ideal: &CMatrix, u_exp: &CMatrix) -> Result<f64> {
    Ok(1.0 - min_gate_infidelity(u_ideal, u_exp)?)
}

/// Overlap |<psi|U_ideal^dag U_exp|psi>|^2 for one state; the sampling oracle.
pub fn state_fidelity(u_ideal: &CMatrix, u_exp: &CMatrix, psi: &nalgebra::DVector<C64>) -> f64 {
    let a = u_ideal * psi;
    let b = u_exp * psi;
    a.dotc(&b).norm_sqr() / psi.norm_squared().powi(2)
}
