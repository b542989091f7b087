//! Dense complex matrices and the handful of helpers the rest of the crate needs.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<Complex64>;

pub const I: C64 = C64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn zeros(n: usize) -> CMatrix {
    CMatrix::zeros(n, n)
}

pub fn sigma_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
}

pub fn sigma_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)])
}

pub fn sigma_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)])
}

/// Pauli matrices in the order (x, y, z).
pub fn paulis() -> [CMatrix; 3] {
    [sigma_x(), sigma_y(), sigma_z()]
}

/// Kronecker product; `a` is the slow index.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Kronecker product of a list of factors, left to right.
pub fn kron_all(factors: &[&CMatrix]) -> CMatrix {
    let mut out = identity(1);
    for f in factors {
        out = kron(&out, f);
    }
    out
}

pub fn dagger(a: &CMatrix) -> CMatrix {
    a.adjoint()
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// Largest absolute entry.
pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().fold(0.0, |m, z| m.max(z.norm()))
}

pub fn hermiticity_defect(h: &CMatrix) -> f64 {
    max_abs(&(h - h.adjoint()))
}

pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let n = u.nrows();
    max_abs(&(u.adjoint() * u - identity(n)))
}

/// Checks Hermiticity relative to the matrix scale.
pub fn check_hermitian(h: &CMatrix, what: &str) -> Result<()> {
    if h.nrows() != h.ncols() || h.nrows() == 0 {
        return Err(Error::Input(format!("{what}: matrix must be square and non-empty")));
    }
    let scale = max_abs(h).max(f64::MIN_POSITIVE);
    let d = hermiticity_defect(h);
    if d > 1e-12 * scale.max(1.0) && d / scale > 1e-12 {
        return Err(Error::Model(format!("{what}: not Hermitian (defect {d:.3e})")));
    }
    Ok(())
}

pub fn check_unitary(u: &CMatrix, tol: f64, what: &str) -> Result<()> {
    if u.nrows() != u.ncols() || u.nrows() == 0 {
        return Err(Error::Input(format!("{what}: matrix must be square and non-empty")));
    }
    let d = unitarity_defect(u);
    if d > tol {
        return Err(Error::Input(format!("{what}: not unitary (defect {d:.3e})")));
    }
    Ok(())
}

/// exp(-i h dt) for Hermitian h (in angular-frequency units).
pub fn expm_hermitian(h: &CMatrix, dt: f64) -> CMatrix {
    (h * c(0.0, -dt)).exp()
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub fn eigh(h: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = h.clone().symmetric_eigen();
    let n = h.nrows();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = idx.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vecs = CMatrix::zeros(n, n);
    for (col, &k) in idx.iter().enumerate() {
        vecs.set_column(col, &eig.eigenvectors.column(k));
    }
    (vals, vecs)
}

pub fn eigvalsh(h: &CMatrix) -> Vec<f64> {
    eigh(h).0
}

/// Real 3x3 matrix into a complex matrix.
pub fn complexify(a: &DMatrix<f64>) -> CMatrix {
    a.map(|x| c(x, 0.0))
}
