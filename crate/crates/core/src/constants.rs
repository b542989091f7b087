//! CODATA 2018 constants in SI units.

use serde::{Deserialize, Serialize};

pub const MU_B: f64 = 9.274_010_078_3e-24;
pub const MU_N: f64 = 5.050_783_746_1e-27;
pub const MU_0: f64 = 1.256_637_062_12e-6;
pub const HBAR: f64 = 1.054_571_817e-34;
pub const H: f64 = 6.626_070_15e-34;
pub const C: f64 = 299_792_458.0;
pub const K_B: f64 = 1.380_649e-23;
pub const EPS_0: f64 = 8.854_187_812_8e-12;

/// Read-only bundle of the constants, for code that wants them as a value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    pub mu_b: f64,
    pub mu_n: f64,
    pub mu_0: f64,
    pub hbar: f64,
    pub h: f64,
    pub c: f64,
    pub k_b: f64,
}

impl PhysicalConstants {
    pub const CODATA: PhysicalConstants =
        PhysicalConstants { mu_b: MU_B, mu_n: MU_N, mu_0: MU_0, hbar: HBAR, h: H, c: C, k_b: K_B };
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::CODATA
    }
}
