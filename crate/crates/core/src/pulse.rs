//! Truncated-Gaussian pulses in the rotating frame.
//!
//! H/hbar = (dw/2) sz + (Omega(t)/2) sx with Omega(t) = Omega0 exp(-t^2/T^2) for
//! |t| <= T_cut. A pulse whose width is solved from the area condition is an
//! exact pi rotation on resonance; off resonance it should leave the state alone.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::erf::{erf, erfc};

use crate::error::{Error, Result};
use crate::fidelity::min_gate_infidelity;
use crate::matrix::{c, sigma_x, sigma_z, CMatrix};
use crate::propagate::{default_dt_max, propagate_su2, step_count, Su2};

const SQRT_PI: f64 = 1.772_453_850_905_516;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseSpec {
    /// Peak Rabi frequency, rad/s.
    pub omega0: f64,
    /// Gaussian width, s.
    pub t_width: f64,
    /// Half-duration cutoff, s.
    pub t_cut: f64,
    /// Detuning, rad/s.
    pub detuning: f64,
}

impl PulseSpec {
    pub fn new(omega0: f64, t_width: f64, t_cut: f64, detuning: f64) -> Result<Self> {
        if !(omega0 > 0.0 && t_width > 0.0 && t_cut > 0.0) || !detuning.is_finite() {
            return Err(Error::Input(format!(
                "pulse needs omega0, T, T_cut > 0 (got {omega0}, {t_width}, {t_cut})"
            )));
        }
        Ok(Self { omega0, t_width, t_cut, detuning })
    }

    /// Pi pulse with the width solved from the area condition.
    pub fn pi_pulse(omega0: f64, t_cut: f64, detuning: f64) -> Result<Self> {
        let t = solve_pi_width(omega0, t_cut)?;
        Self::new(omega0, t, t_cut, detuning)
    }

    pub fn with_detuning(&self, detuning: f64) -> Self {
        Self { detuning, ..*self }
    }

    pub fn envelope(&self, t: f64) -> f64 {
        if t.abs() <= self.t_cut {
            self.omega0 * (-(t / self.t_width).powi(2)).exp()
        } else {
            0.0
        }
    }

    /// Integral of the envelope over the pulse.
    pub fn area(&self) -> f64 {
        self.omega0 * self.t_width * SQRT_PI * erf(self.t_cut / self.t_width)
    }

    /// Integral of the envelope over [a, b].
    pub fn area_between(&self, a: f64, b: f64) -> f64 {
        let (a, b) = (a.max(-self.t_cut), b.min(self.t_cut));
        if b <= a {
            return 0.0;
        }
        let t = self.t_width;
        // erf differences via erfc on the far side keep tail steps accurate
        let diff = if a >= 0.0 {
            erfc(a / t) - erfc(b / t)
        } else if b <= 0.0 {
            erfc(-b / t) - erfc(-a / t)
        } else {
            erf(b / t) - erf(a / t)
        };
        self.omega0 * t * SQRT_PI / 2.0 * diff
    }

    pub fn duration(&self) -> f64 {
        2.0 * self.t_cut
    }

    /// Operator norm bound of H/hbar.
    pub fn norm_bound(&self) -> f64 {
        0.5 * self.omega0.hypot(self.detuning)
    }

    pub fn default_dt_max(&self) -> f64 {
        default_dt_max(self.norm_bound())
    }
}

/// H/hbar in rad/s.
pub fn rwa_hamiltonian(pulse: &PulseSpec, t: f64) -> CMatrix {
    sigma_z() * c(pulse.detuning / 2.0, 0.0) + sigma_x() * c(pulse.envelope(t) / 2.0, 0.0)
}

/// Solves T = sqrt(pi) / (Omega0 erf(T_cut/T)), i.e. pulse area = pi.
pub fn solve_pi_width(omega0: f64, t_cut: f64) -> Result<f64> {
    if !(omega0 > 0.0 && t_cut > 0.0) {
        return Err(Error::Input("solve_pi_width: omega0 and T_cut must be positive".into()));
    }
    // with u = T_cut/T the area is Omega0 T_cut sqrt(pi) erf(u)/u, decreasing in u from 2 Omega0 T_cut
    let kappa = PI / (omega0 * t_cut);
    if kappa >= 2.0 {
        return Err(Error::Infeasible(format!(
            "no pi pulse: Omega0*T_cut = {:.6} does not exceed pi/2",
            omega0 * t_cut
        )));
    }
    let g = |u: f64| SQRT_PI * erf(u) / u - kappa;
    let mut lo = 1e-300_f64.max(1e-8);
    let mut hi = SQRT_PI / kappa + 1.0;
    if g(lo) < 0.0 {
        // kappa within ~1e-16 of 2: the root sits at tiny u, take the series root
        let u = (3.0 * (1.0 - kappa / 2.0)).max(0.0).sqrt();
        return Ok(t_cut / u.max(1e-12));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    Ok(t_cut / (0.5 * (lo + hi)))
}

/// Closed-form first-order error with the leading truncation correction.
/// x = T_cut/T, y = dw T/2.
pub fn pulse_error_first_order(pulse: &PulseSpec) -> f64 {
    let x = pulse.t_cut / pulse.t_width;
    let y = pulse.detuning * pulse.t_width / 2.0;
    first_order_xy(x, y)
}

pub fn first_order_xy(x: f64, y: f64) -> f64 {
    let y = y.abs();
    let tail = (-x * x).exp() / (SQRT_PI * (x * x + y * y))
        * (x * (2.0 * x * y).cos() - y * (2.0 * x * y).sin());
    let amp = PI / (2.0 * erf(x)) * ((-y * y).exp() - tail);
    amp * amp
}

/// Propagates the pulse over [-T_cut, T_cut]. Each piecewise-constant step
/// carries the exact step average of the envelope, so the resonant rotation
/// angle equals the pulse area exactly; off resonance this is second order
/// like midpoint sampling.
pub fn propagate_pulse(pulse: &PulseSpec, dt_max: f64) -> Result<Su2> {
    if !(dt_max > 0.0) {
        return Err(Error::Input("dt_max must be positive".into()));
    }
    let n = step_count(-pulse.t_cut, pulse.t_cut, dt_max);
    let dt = pulse.duration() / n as f64;
    let half_det = pulse.detuning / 2.0;
    let mut u = Su2::IDENTITY;
    for k in 0..n {
        let a = -pulse.t_cut + k as f64 * dt;
        let om = pulse.area_between(a, a + dt) / dt;
        u = Su2::step(om / 2.0, 0.0, half_det, dt).then_after(&u);
    }
    Ok(u)
}

/// Same pulse through the generic midpoint propagator.
pub fn propagate_pulse_midpoint(pulse: &PulseSpec, dt_max: f64) -> Result<Su2> {
    let half_det = pulse.detuning / 2.0;
    propagate_su2(|t| [pulse.envelope(t) / 2.0, 0.0, half_det], -pulse.t_cut, pulse.t_cut, dt_max)
}

/// Error of the pulse as a gate: on resonance the target is a flip (sx up to
/// phase); detuned, the target is "leave populations alone" with free phases,
/// whose worst-case infidelity is the flip probability.
pub fn pulse_error_exact(pulse: &PulseSpec) -> Result<f64> {
    pulse_error_exact_dt(pulse, pulse.default_dt_max())
}

pub fn pulse_error_exact_dt(pulse: &PulseSpec, dt_max: f64) -> Result<f64> {
    let u = propagate_pulse(pulse, dt_max)?;
    Ok(if pulse.detuning == 0.0 { flip_target_error(&u) } else { u.flip_probability() })
}

/// 1 - F_min against sx up to global phase.
pub fn flip_target_error(u: &Su2) -> f64 {
    min_gate_infidelity(&sigma_x(), &u.to_matrix()).unwrap_or(1.0)
}

/// 1 - F_min against the best phase-only diagonal target; equals |U_10|^2.
pub fn spectator_error(u: &Su2) -> f64 {
    let phi = u.a.arg();
    let target = CMatrix::from_diagonal(&nalgebra::dvector![c(phi.cos(), phi.sin()), c(phi.cos(), -phi.sin())]);
    min_gate_infidelity(&target, &u.to_matrix()).unwrap_or(1.0)
}

/// Which error evaluator an optimisation uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorModel {
    FirstOrder,
    Full,
}

impl ErrorModel {
    pub fn name(&self) -> &'static str {
        match self {
            ErrorModel::FirstOrder => "first_order",
            ErrorModel::Full => "full",
        }
    }
}

/// Error of a pi pulse with Omega0 = 1 and T_cut = xc at detuning d (units of
/// Omega0). The pulse problem is scale free, so this is the whole family.
pub fn scaled_error(model: ErrorModel, xc: f64, t_width: f64, d: f64) -> f64 {
    match model {
        ErrorModel::FirstOrder => first_order_xy(xc / t_width, d * t_width / 2.0),
        ErrorModel::Full => {
            let p = PulseSpec { omega0: 1.0, t_width, t_cut: xc, detuning: d };
            let u = propagate_pulse(&p, p.default_dt_max()).expect("valid interval");
            if d == 0.0 {
                flip_target_error(&u)
            } else {
                u.flip_probability()
            }
        }
    }
}


/// Settings for the scale-free scan over pulse shapes. With Omega0 = 1 the
/// family is labelled by xc = Omega0 T_cut; detunings are in units of Omega0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanSettings {
    pub xc_min: f64,
    pub xc_max: f64,
    pub xc_step: f64,
    /// Detuning grid spacing times xc (oscillation period in d is 2 pi/xc).
    pub spacing: f64,
    /// Largest T_pi * dw considered; bounds the detuning range per shape.
    pub tau_max: f64,
    pub bisect_iters: usize,
}

impl Default for ScanSettings {
    fn default() -> Self {
        Self { xc_min: 1.75, xc_max: 7.5, xc_step: 0.01, spacing: 0.25, tau_max: 64.0, bisect_iters: 20 }
    }
}

impl ScanSettings {
    /// Narrowed shape range for a single threshold.
    pub fn for_threshold(threshold: f64) -> Self {
        let s = (0.5 * (1.0 / threshold).ln()).sqrt();
        let tau_max = (2.0 * (4.0 * s * s) + 16.0).max(24.0);
        Self { xc_min: (0.9 * s).max(1.6), xc_max: 2.4 * s + 1.0, tau_max, ..Self::default() }
    }
}

/// Error versus detuning for one pulse shape, with local maxima refined.
#[derive(Debug, Clone)]
pub struct ShapeCurve {
    pub xc: f64,
    pub t_width: f64,
    pub ds: Vec<f64>,
    pub errs: Vec<f64>,
}

impl ShapeCurve {
    pub fn compute(model: ErrorModel, xc: f64, settings: &ScanSettings) -> Result<Self> {
        let t_width = solve_pi_width(1.0, xc)?;
        let h = settings.spacing / xc;
        let d_lo = 0.2;
        let d_hi = (settings.tau_max / (2.0 * xc)).max(d_lo + 2.0 * h);
        let n = ((d_hi - d_lo) / h).ceil() as usize;
        let mut pts: Vec<(f64, f64)> = (0..=n)
            .map(|k| {
                let d = d_lo + k as f64 * h;
                (d, scaled_error(model, xc, t_width, d))
            })
            .collect();
        let mut peaks = Vec::new();
        for k in 1..pts.len() - 1 {
            if pts[k].1 > pts[k - 1].1 && pts[k].1 >= pts[k + 1].1 {
                let f = |d: f64| scaled_error(model, xc, t_width, d);
                let tol = 1e-6 * h;
                if let Ok((dp, ep)) = crate::optim::golden_max(f, pts[k - 1].0, pts[k + 1].0, tol, 60) {
                    if ep > pts[k].1 {
                        peaks.push((dp, ep));
                    }
                }
            }
        }
        pts.extend(peaks);
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (ds, errs) = pts.into_iter().unzip();
        Ok(Self { xc, t_width, ds, errs })
    }

    /// Smallest d such that the error stays below `eps` for every larger
    /// detuning on the curve. None if the curve never gets below `eps`.
    pub fn d_star(&self, model: ErrorModel, eps: f64, bisect_iters: usize) -> Option<f64> {
        let n = self.ds.len();
        if self.errs[n - 1] >= eps {
            return None;
        }
        let k = match (0..n).rev().find(|&k| self.errs[k] >= eps) {
            None => return Some(self.ds[0]),
            Some(k) => k,
        };
        let (mut lo, mut hi) = (self.ds[k], self.ds[k + 1]);
        for _ in 0..bisect_iters {
            let mid = 0.5 * (lo + hi);
            if scaled_error(model, self.xc, self.t_width, mid) >= eps {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(hi)
    }
}

/// Best shape for a threshold, in units where the minimal detuning is 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanOptimum {
    /// T_pi * dw_min.
    pub tau: f64,
    pub xc: f64,
    /// Gaussian width for Omega0 = 1.
    pub t_width: f64,
    /// dw_min / Omega0.
    pub d_star: f64,
}

/// Error curves for the whole shape family; query many thresholds cheaply.
#[derive(Debug, Clone)]
pub struct PulseScan {
    pub model: ErrorModel,
    pub settings: ScanSettings,
    pub curves: Vec<ShapeCurve>,
}

impl PulseScan {
    pub fn new(model: ErrorModel, settings: ScanSettings) -> Result<Self> {
        if !(settings.xc_min > PI / 2.0 && settings.xc_max >= settings.xc_min && settings.xc_step > 0.0) {
            return Err(Error::Input("scan: need pi/2 < xc_min <= xc_max and xc_step > 0".into()));
        }
        let n = ((settings.xc_max - settings.xc_min) / settings.xc_step).round() as usize;
        let curves = (0..=n)
            .map(|k| ShapeCurve::compute(model, settings.xc_min + k as f64 * settings.xc_step, &settings))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { model, settings, curves })
    }

    pub fn best(&self, eps: f64) -> Option<ScanOptimum> {
        let mut best: Option<ScanOptimum> = None;
        for c in &self.curves {
            if let Some(d) = c.d_star(self.model, eps, self.settings.bisect_iters) {
                let tau = 2.0 * c.xc * d;
                if best.map_or(true, |b| tau < b.tau) {
                    best = Some(ScanOptimum { tau, xc: c.xc, t_width: c.t_width, d_star: d });
                }
            }
        }
        best
    }

    /// Optimal T_pi * dw for each threshold (NaN where out of range).
    pub fn tau_curve(&self, thresholds: &[f64]) -> Vec<f64> {
        thresholds.iter().map(|&e| self.best(e).map_or(f64::NAN, |b| b.tau)).collect()
    }
}

/// Detuning grid for verifying an optimised pulse: log-spaced points over
/// [dw_min, span * dw_min] plus refined local maxima.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetuningGrid {
    pub points: usize,
    pub span: f64,
}

impl Default for DetuningGrid {
    fn default() -> Self {
        Self { points: 64, span: 16.0 }
    }
}

impl DetuningGrid {
    pub fn values(&self, dw_min: f64) -> Vec<f64> {
        let n = self.points.max(2);
        (0..n).map(|k| dw_min * self.span.powf(k as f64 / (n - 1) as f64)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseOptimizationResult {
    pub t_pi: f64,
    pub omega0: f64,
    pub t_width: f64,
    pub t_cut: f64,
    pub max_error: f64,
    pub threshold: f64,
    pub model: ErrorModel,
    /// Detunings (rad/s) on which the error bound was checked.
    pub detuning_grid: Vec<f64>,
}

fn model_error(model: ErrorModel, p: &PulseSpec) -> f64 {
    match model {
        ErrorModel::FirstOrder => pulse_error_first_order(p),
        ErrorModel::Full => pulse_error_exact(p).unwrap_or(1.0),
    }
}

/// Shortest truncated-Gaussian pi pulse whose error stays below `threshold`
/// for every detuning >= `delta_omega_min`.
pub fn optimize_pi_pulse(
    threshold: f64,
    delta_omega_min: f64,
    grid: DetuningGrid,
    model: ErrorModel,
) -> Result<PulseOptimizationResult> {
    let scan = PulseScan::new(model, ScanSettings::for_threshold(threshold))?;
    optimize_with_scan(&scan, threshold, delta_omega_min, grid)
}

/// As [`optimize_pi_pulse`], reusing a precomputed scan.
pub fn optimize_with_scan(
    scan: &PulseScan,
    threshold: f64,
    delta_omega_min: f64,
    grid: DetuningGrid,
) -> Result<PulseOptimizationResult> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::Input(format!("threshold {threshold} outside (0, 1)")));
    }
    if !(delta_omega_min > 0.0) {
        return Err(Error::Input("delta_omega_min must be positive".into()));
    }
    let best = scan
        .best(threshold)
        .ok_or_else(|| Error::Infeasible(format!("threshold {threshold:e} not reachable on the scanned shapes")))?;
    let omega0 = delta_omega_min / best.d_star;
    let t_cut = best.xc / omega0;
    let t_width = best.t_width / omega0;
    let base = PulseSpec::new(omega0, t_width, t_cut, delta_omega_min)?;
    let mut dets = grid.values(delta_omega_min);
    let errs: Vec<f64> = dets.iter().map(|&d| model_error(scan.model, &base.with_detuning(d))).collect();
    let mut max_error = errs.iter().cloned().fold(0.0, f64::max);
    for k in 1..dets.len() - 1 {
        if errs[k] > errs[k - 1] && errs[k] >= errs[k + 1] {
            let f = |d: f64| model_error(scan.model, &base.with_detuning(d));
            let (dp, ep) = crate::optim::golden_max(f, dets[k - 1], dets[k + 1], 1e-9 * dets[k], 80)?;
            max_error = max_error.max(ep);
            dets.push(dp);
        }
    }
    dets.sort_by(f64::total_cmp);
    if max_error >= threshold {
        return Err(Error::Infeasible(format!(
            "optimised pulse misses threshold on the check grid ({max_error:e} >= {threshold:e})"
        )));
    }
    Ok(PulseOptimizationResult {
        t_pi: 2.0 * t_cut,
        omega0,
        t_width,
        t_cut,
        max_error,
        threshold,
        model: scan.model,
        detuning_grid: dets,
    })
}

/// Leading-order analytic T_pi * dw for a threshold.
///
/// With S = sqrt(log(1/eps)/2), x = S - log(S)/(2S) + alpha/S and y = S + beta/S,
/// the error reduces to (pi^2/4) (e^{-2 beta} - e^{-2 alpha} K/(2 sqrt(pi)))^2
/// in units of eps, K = cos(phi) - sin(phi) the truncation phase. alpha + beta is
/// minimised subject to that staying <= 1 for every larger detuning, where
/// beta' > beta also advances the phase by 2 (beta' - beta).
pub fn analytic_gate_time(threshold: f64) -> Result<AnalyticGateTime> {
    if !(threshold > 0.0 && threshold < 0.5) {
        return Err(Error::Input(format!("threshold {threshold} outside (0, 0.5)")));
    }
    let l = (1.0 / threshold).ln();
    let phi0 = threshold.ln();
    let leading = 2.0 * l - (0.5 * l).ln();
    let sum = minimise_alpha_beta(phi0);
    Ok(AnalyticGateTime { tau: leading + 4.0 * sum, leading, alpha_plus_beta: sum })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyticGateTime {
    pub tau: f64,
    pub leading: f64,
    pub alpha_plus_beta: f64,
}

fn max_alpha_weight(beta: f64, phi0: f64) -> f64 {
    const NB: usize = 400;
    let two_over_pi = 2.0 / PI;
    let pts: Vec<(f64, f64)> = (0..NB)
        .map(|k| {
            let db = 8.0 * k as f64 / (NB - 1) as f64;
            let ph = phi0 + 2.0 * db;
            ((-2.0 * (beta + db)).exp(), (ph.cos() - ph.sin()) / (2.0 * SQRT_PI))
        })
        .collect();
    let ok = |p: f64| pts.iter().all(|&(q, k)| (q - p * k).abs() <= two_over_pi);
    if !ok(0.0) {
        return 0.0;
    }
    let mut hi = 1.0;
    while ok(hi) && hi < 1e12 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

fn minimise_alpha_beta(phi0: f64) -> f64 {
    let mut best = f64::INFINITY;
    for k in 0..=400 {
        let beta = -1.0 + 4.0 * k as f64 / 400.0;
        let p = max_alpha_weight(beta, phi0);
        if p > 0.0 {
            best = best.min(-0.5 * (p * (-2.0 * beta).exp()).ln());
        }
    }
    best
}
