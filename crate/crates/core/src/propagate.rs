//! Time-ordered propagation of time-dependent Hamiltonians.
//!
//! Hamiltonians passed in here are H/hbar, i.e. angular frequencies in rad/s
//! (or any consistent inverse-time unit matching `t`).

use crate::error::{Error, Result};
use crate::matrix::{c, check_hermitian, identity, CMatrix, C64};

/// Phase budget per step used to pick default step sizes.
pub const PHASE_PER_STEP: f64 = 0.05;

/// Step size such that `norm * dt <= PHASE_PER_STEP`.
pub fn default_dt_max(norm: f64) -> f64 {
    if norm > 0.0 {
        PHASE_PER_STEP / norm
    } else {
        f64::INFINITY
    }
}

/// Number of steps for the interval, at least one.
pub fn step_count(t0: f64, t1: f64, dt_max: f64) -> usize {
    let n = ((t1 - t0) / dt_max).ceil();
    if n.is_finite() {
        (n as usize).max(1)
    } else {
        1
    }
}

fn check_interval(t0: f64, t1: f64, dt_max: f64) -> Result<()> {
    if !(t1 > t0) {
        return Err(Error::Input(format!("propagate: need t1 > t0 (got {t0}, {t1})")));
    }
    if !(dt_max > 0.0) {
        return Err(Error::Input("propagate: dt_max must be positive".into()));
    }
    Ok(())
}

/// U(t1, t0) by piecewise-constant steps sampled at step midpoints, each step
/// exponentiated exactly (Pade scaling and squaring).
pub fn propagate<F>(h: F, t0: f64, t1: f64, dt_max: f64) -> Result<CMatrix>
where
    F: Fn(f64) -> CMatrix,
{
    check_interval(t0, t1, dt_max)?;
    let n = step_count(t0, t1, dt_max);
    let dt = (t1 - t0) / n as f64;
    let mut u: Option<CMatrix> = None;
    for k in 0..n {
        let hk = h(t0 + (k as f64 + 0.5) * dt);
        check_hermitian(&hk, "propagate callback")?;
        let step = (hk * c(0.0, -dt)).exp();
        u = Some(match u {
            None => step,
            Some(prev) => {
                if prev.nrows() != step.nrows() {
                    return Err(Error::Model("propagate: callback changed dimension".into()));
                }
                step * prev
            }
        });
    }
    Ok(u.unwrap_or_else(|| identity(1)))
}

/// exp(-i H t) for a constant Hamiltonian.
pub fn evolve_constant(h: &CMatrix, t: f64) -> Result<CMatrix> {
    check_hermitian(h, "evolve_constant")?;
    Ok((h * c(0.0, -t)).exp())
}

/// Element of SU(2) stored as U = [[a, -conj(b)], [b, conj(a)]].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Su2 {
    pub a: C64,
    pub b: C64,
}

impl Su2 {
    pub const IDENTITY: Su2 = Su2 { a: C64::new(1.0, 0.0), b: C64::new(0.0, 0.0) };

    /// exp(-i dt (hx sx + hy sy + hz sz)).
    pub fn step(hx: f64, hy: f64, hz: f64, dt: f64) -> Su2 {
        let r = (hx * hx + hy * hy + hz * hz).sqrt();
        let phi = r * dt;
        let (s, co) = phi.sin_cos();
        // sin(phi)/r with the removable singularity handled
        let sr = if r * dt > 1e-8 { s / r } else { dt * (1.0 - phi * phi / 6.0) };
        // -i sr (hx sx + hy sy + hz sz): entry (1,0) is -i sr (hx + i hy)
        Su2 { a: C64::new(co, -sr * hz), b: C64::new(sr * hy, -sr * hx) }
    }

    /// self applied after `prev`, i.e. self * prev.
    pub fn then_after(&self, prev: &Su2) -> Su2 {
        // [[a,-b*],[b,a*]] [[p,-q*],[q,p*]]: first column gives (a p - b* q, b p + a* q)
        Su2 {
            a: self.a * prev.a - self.b.conj() * prev.b,
            b: self.b * prev.a + self.a.conj() * prev.b,
        }
    }

    pub fn to_matrix(&self) -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[self.a, -self.b.conj(), self.b, self.a.conj()])
    }

    /// |<1|U|0>|^2.
    pub fn flip_probability(&self) -> f64 {
        self.b.norm_sqr()
    }

    pub fn norm_defect(&self) -> f64 {
        (self.a.norm_sqr() + self.b.norm_sqr() - 1.0).abs()
    }
}

/// Closed-form midpoint propagation for H(t) = hx(t) sx + hy(t) sy + hz(t) sz.
/// Same discretisation as [`propagate`], specialised to 2x2.
pub fn propagate_su2<F>(field: F, t0: f64, t1: f64, dt_max: f64) -> Result<Su2>
where
    F: Fn(f64) -> [f64; 3],
{
    check_interval(t0, t1, dt_max)?;
    let n = step_count(t0, t1, dt_max);
    let dt = (t1 - t0) / n as f64;
    let mut u = Su2::IDENTITY;
    for k in 0..n {
        let [hx, hy, hz] = field(t0 + (k as f64 + 0.5) * dt);
        u = Su2::step(hx, hy, hz, dt).then_after(&u);
    }
    Ok(u)
}
