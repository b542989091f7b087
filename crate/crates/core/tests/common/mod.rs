#![allow(dead_code)]

use nalgebra::Vector3;
use renq_core::ion::{GTensor, IonSpec};
use renq_core::matrix::{c, CMatrix};

/// Er-like ion with axial tensors along z; g_perp = 0 gives an Ising doublet.
pub fn axial_ion(g_par: f64, g_perp: f64, nuclear_spin: f64, a_j: f64) -> IonSpec {
    let z = Vector3::z();
    IonSpec {
        j_ground: 7.5,
        j_excited: 6.5,
        nuclear_spin,
        a_j_ground: a_j,
        a_j_excited: a_j,
        g_j_ground: 1.2,
        g_j_excited: 1.11,
        g_ground: GTensor::axial(0.5 * g_par, 0.8 * g_par, z).unwrap(),
        g_excited: GTensor::axial(g_par, g_perp, z).unwrap(),
        g_n: -0.1618,
        delta_j: 195e12,
        delta_cf: 1e12,
        mu_e_transition: 2e-32,
        t2_excited: 4.4e-3,
    }
}

/// Random Hermitian matrix from a flat list of at least n^2 reals.
pub fn hermitian(n: usize, xs: &[f64]) -> CMatrix {
    let mut h = CMatrix::zeros(n, n);
    let mut k = 0;
    for i in 0..n {
        h[(i, i)] = c(xs[k], 0.0);
        k += 1;
        for j in i + 1..n {
            h[(i, j)] = c(xs[k], xs[k + 1]);
            h[(j, i)] = c(xs[k], -xs[k + 1]);
            k += 2;
        }
    }
    h
}
