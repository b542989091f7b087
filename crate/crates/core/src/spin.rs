//! Angular-momentum matrices and Wigner rotation elements.
//!
//! Basis ordering is m = j, j-1, ..., -j everywhere in the crate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{c, CMatrix};

/// A half-integer angular momentum stored as 2j.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AngularMomentum {
    two_j: u32,
}

impl AngularMomentum {
    pub fn new(j: f64) -> Result<Self> {
        let two_j = 2.0 * j;
        if !j.is_finite() || j < 0.0 || (two_j - two_j.round()).abs() > 1e-9 {
            return Err(Error::Input(format!("j = {j} is not a non-negative half-integer")));
        }
        Ok(Self { two_j: two_j.round() as u32 })
    }

    pub fn from_twice(two_j: u32) -> Self {
        Self { two_j }
    }

    pub fn j(&self) -> f64 {
        self.two_j as f64 / 2.0
    }

    pub fn twice(&self) -> u32 {
        self.two_j
    }

    pub fn dim(&self) -> usize {
        self.two_j as usize + 1
    }

    /// True for odd 2j.
    pub fn is_half_odd(&self) -> bool {
        self.two_j % 2 == 1
    }

    /// m value of basis index k.
    pub fn m(&self, k: usize) -> f64 {
        self.j() - k as f64
    }

    /// Basis index of m.
    pub fn index(&self, m: f64) -> Option<usize> {
        let k = self.j() - m;
        if k < -1e-9 || k > self.two_j as f64 + 1e-9 || (k - k.round()).abs() > 1e-9 {
            None
        } else {
            Some(k.round() as usize)
        }
    }

    /// (Jx, Jy, Jz) in units of hbar.
    pub fn ops(&self) -> (CMatrix, CMatrix, CMatrix) {
        let n = self.dim();
        let j = self.j();
        let mut jp = CMatrix::zeros(n, n);
        let mut jz = CMatrix::zeros(n, n);
        for k in 0..n {
            let m = self.m(k);
            jz[(k, k)] = c(m, 0.0);
            // J+ |m> = sqrt(j(j+1) - m(m+1)) |m+1>, and m+1 sits at index k-1
            if k > 0 {
                jp[(k - 1, k)] = c((j * (j + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
            }
        }
        let jm = jp.adjoint();
        let jx = (&jp + &jm) * c(0.5, 0.0);
        let jy = (&jp - &jm) * c(0.0, -0.5);
        (jx, jy, jz)
    }
}

pub fn angular_momentum_ops(j: f64) -> Result<(CMatrix, CMatrix, CMatrix)> {
    Ok(AngularMomentum::new(j)?.ops())
}

fn ln_factorial(n: i64) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

/// Wigner small-d element d^j_{m', m}(beta) = <j m'| exp(-i beta Jy) |j m>.
pub fn wigner_small_d(j: f64, mp: f64, m: f64, beta: f64) -> f64 {
    let tj = (2.0 * j).round() as i64;
    let jpm = ((j + m).round()) as i64;
    let jmm = ((j - m).round()) as i64;
    let jpmp = ((j + mp).round()) as i64;
    let jmmp = ((j - mp).round()) as i64;
    let mpm = jpmp - jpm; // m' - m
    let pref = 0.5
        * (ln_factorial(jpmp) + ln_factorial(jmmp) + ln_factorial(jpm) + ln_factorial(jmm));
    let (cb, sb) = ((beta / 2.0).cos(), (beta / 2.0).sin());
    let smin = 0.max(-mpm);
    let smax = jpm.min(jmmp);
    let mut sum = 0.0;
    for s in smin..=smax {
        let den = ln_factorial(jpm - s) + ln_factorial(s) + ln_factorial(mpm + s) + ln_factorial(jmmp - s);
        let pc = tj - mpm - 2 * s;
        let ps = mpm + 2 * s;
        let sign = if (mpm + s) % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * (pref - den).exp() * cb.powi(pc as i32) * sb.powi(ps as i32);
    }
    sum
}

/// Full (2j+1)x(2j+1) small-d matrix.
pub fn wigner_small_d_matrix(am: AngularMomentum, beta: f64) -> nalgebra::DMatrix<f64> {
    let n = am.dim();
    nalgebra::DMatrix::from_fn(n, n, |a, b| wigner_small_d(am.j(), am.m(a), am.m(b), beta))
}
