//! Comparison with a dipole-blockade CNOT, the Stark addressability budget,
//! activation Rabi bounds and the robustness estimates for spectator qubits.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::constants::{H, HBAR, MU_0, MU_B, MU_N};
use crate::error::{Error, Result};
use crate::pulse::{optimize_with_scan, pulse_error_exact, DetuningGrid, ErrorModel, PulseScan, PulseSpec, ScanSettings, ShapeCurve};

/// Direct-gate time pi hbar/(4 J) with J = hbar dw/2.
pub fn direct_gate_time(delta_omega: f64) -> f64 {
    PI / (2.0 * delta_omega)
}

/// Pulse durations of the blockade sequence that count against the gate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockadeTime {
    /// Pulses 2 and 4 (each at half the error) and pulse 3.
    pub pulses: [f64; 3],
    pub total: f64,
}

fn check_target(target_error: f64) -> Result<()> {
    if !(target_error > 1e-9 && target_error < 1e-1) {
        return Err(Error::Input(format!("target error {target_error:e} outside (1e-9, 1e-1)")));
    }
    Ok(())
}

/// Target-qubit pulses of the blockade CNOT: two optimised at half the error
/// budget, one at the full budget, for a blockade shift `delta_omega`.
pub fn blockade_gate_time(target_error: f64, delta_omega: f64, mode: ErrorModel) -> Result<BlockadeTime> {
    check_target(target_error)?;
    let lo = ScanSettings::for_threshold(target_error / 2.0);
    let hi = ScanSettings::for_threshold(target_error);
    let settings = ScanSettings { xc_min: hi.xc_min, xc_max: lo.xc_max, tau_max: lo.tau_max, ..lo };
    let scan = PulseScan::new(mode, settings)?;
    blockade_gate_time_with_scan(&scan, target_error, delta_omega)
}

/// As [`blockade_gate_time`] on a precomputed scan.
pub fn blockade_gate_time_with_scan(scan: &PulseScan, target_error: f64, delta_omega: f64) -> Result<BlockadeTime> {
    check_target(target_error)?;
    let half = optimize_with_scan(scan, target_error / 2.0, delta_omega, DetuningGrid::default())?.t_pi;
    let full = optimize_with_scan(scan, target_error, delta_omega, DetuningGrid::default())?.t_pi;
    Ok(BlockadeTime { pulses: [half, full, half], total: 2.0 * half + full })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockadeComparison {
    pub target_error: f64,
    pub blockade_time: f64,
    pub direct_time: f64,
    pub speedup: f64,
}

/// tau = a L + b with L = 2 log(1/eps) - log(log(1/eps)/2).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TauFit {
    pub a: f64,
    pub b: f64,
    /// Error window (lo, hi) of the points used.
    pub window: (f64, f64),
    pub points_used: usize,
    pub method: String,
}

impl TauFit {
    pub fn tau(&self, eps: f64) -> f64 {
        self.a * log_form(eps) + self.b
    }

    /// Analytic speed-up 6/pi (2 a log(1/eps) + b).
    pub fn speedup_overlay(&self, eps: f64) -> f64 {
        6.0 / PI * (2.0 * self.a * (1.0 / eps).ln() + self.b)
    }
}

/// 2 log(1/eps) - log(log(1/eps)/2).
pub fn log_form(eps: f64) -> f64 {
    let l = (1.0 / eps).ln();
    2.0 * l - (0.5 * l).ln()
}

/// Lower convex hull of points sorted by x (monotone chain).
fn lower_hull(mut pts: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut hull: Vec<(f64, f64)> = Vec::new();
    for p in pts {
        while hull.len() >= 2 {
            let (o, a) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (a.0 - o.0) * (p.1 - o.1) - (a.1 - o.1) * (p.0 - o.0);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull
}

fn least_squares(pts: &[(f64, f64)]) -> Option<(f64, f64)> {
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return None;
    }
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0, b + p.1));
    let (mx, my) = (sx / n, sy / n);
    let (sxx, sxy) = pts.iter().fold((0.0, 0.0), |(a, b), p| (a + (p.0 - mx).powi(2), b + (p.0 - mx) * (p.1 - my)));
    if sxx == 0.0 {
        return None;
    }
    let a = sxy / sxx;
    Some((a, my - a * mx))
}

/// Fits tau(eps) against the log form on the lower envelope of the staircase
/// (oscillation peaks excluded) within `window`.
pub fn fit_tau(eps: &[f64], tau: &[f64], window: (f64, f64)) -> Result<TauFit> {
    let pts: Vec<(f64, f64)> = eps
        .iter()
        .zip(tau)
        .filter(|(e, t)| **e >= window.0 && **e <= window.1 && t.is_finite())
        .map(|(e, t)| (log_form(*e), *t))
        .collect();
    let hull = lower_hull(pts);
    let (a, b) = least_squares(&hull).ok_or_else(|| Error::Input("fit needs at least two distinct points".into()))?;
    Ok(TauFit { a, b, window, points_used: hull.len(), method: "least squares on lower convex hull".into() })
}

/// Mean tau distance between successive jumps of the optimised staircase.
/// Consecutive steps larger than `min_jump` form one jump, located at the
/// midpoint of its first and last value.
pub fn jump_spacing(tau: &[f64], min_jump: f64) -> Option<f64> {
    let mut at = vec![];
    let mut open: Option<f64> = None;
    for w in tau.windows(2) {
        let big = w[1].is_finite() && w[0].is_finite() && (w[1] - w[0]).abs() > min_jump;
        match (big, open) {
            (true, None) => open = Some(w[0]),
            (false, Some(start)) => {
                at.push(0.5 * (start + w[0]));
                open = None;
            }
            _ => {}
        }
    }
    if let (Some(start), Some(&last)) = (open, tau.last()) {
        at.push(0.5 * (start + last));
    }
    if at.len() < 2 {
        return None;
    }
    Some((at[at.len() - 1] - at[0]).abs() / (at.len() - 1) as f64)
}

/// Local error maxima of one pulse shape as a function of T_pi dw.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeakSpacing {
    pub xc: f64,
    /// T_pi dw at each refined maximum.
    pub peaks: Vec<f64>,
    pub mean_spacing: f64,
}

/// Error maxima of the shape xc = Omega0 T_cut versus T_pi dw, in [tau_min, tau_max].
/// Maxima below `floor` (numerical noise) are ignored.
pub fn error_peak_spacing(model: ErrorModel, xc: f64, tau_min: f64, tau_max: f64, floor: f64) -> Result<PeakSpacing> {
    let settings = ScanSettings { tau_max, ..ScanSettings::default() };
    let c = ShapeCurve::compute(model, xc, &settings)?;
    let mut peaks = vec![];
    for k in 1..c.errs.len() - 1 {
        let tau = 2.0 * xc * c.ds[k];
        if c.errs[k] > c.errs[k - 1] && c.errs[k] >= c.errs[k + 1] && c.errs[k] > floor && tau >= tau_min {
            peaks.push(tau);
        }
    }
    if peaks.len() < 2 {
        return Err(Error::Infeasible(format!("fewer than two error maxima for xc = {xc}")));
    }
    let mean_spacing = (peaks[peaks.len() - 1] - peaks[0]) / (peaks.len() - 1) as f64;
    Ok(PeakSpacing { xc, peaks, mean_spacing })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeedupCurve {
    pub model: ErrorModel,
    pub points: Vec<BlockadeComparison>,
    /// Optimal T_pi dw at each target error.
    pub tau: Vec<f64>,
    /// Same at half the target error.
    pub tau_half: Vec<f64>,
    pub fit: TauFit,
    pub overlay: Vec<f64>,
    pub jump_spacing: Option<f64>,
}

/// Scan settings covering every threshold in [eps_lo/2, eps_hi].
pub fn settings_for_range(eps_lo: f64, eps_hi: f64) -> ScanSettings {
    let lo = ScanSettings::for_threshold(eps_lo / 2.0);
    let hi = ScanSettings::for_threshold(eps_hi);
    ScanSettings { xc_min: hi.xc_min, xc_max: lo.xc_max, tau_max: lo.tau_max, ..lo }
}

/// log-spaced errors, `per_decade` points per decade, inclusive.
pub fn log_grid(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    let n = ((hi / lo).log10() * per_decade as f64).round() as usize;
    (0..=n).map(|k| lo * (hi / lo).powf(k as f64 / n.max(1) as f64)).collect()
}

/// Numeric speed-up curve from one scan, with the fit window recorded.
pub fn speedup_curve(scan: &PulseScan, errors: &[f64], fit_window: (f64, f64)) -> Result<SpeedupCurve> {
    let tau = scan.tau_curve(errors);
    let halves: Vec<f64> = errors.iter().map(|e| e / 2.0).collect();
    let tau_half = scan.tau_curve(&halves);
    let mut points = Vec::with_capacity(errors.len());
    for (k, &e) in errors.iter().enumerate() {
        check_target(e)?;
        if !(tau[k].is_finite() && tau_half[k].is_finite()) {
            return Err(Error::Infeasible(format!("error {e:e} outside the scanned shape family")));
        }
        // dw = 1: times in units of 1/dw
        let blockade = 2.0 * tau_half[k] + tau[k];
        let direct = direct_gate_time(1.0);
        points.push(BlockadeComparison { target_error: e, blockade_time: blockade, direct_time: direct, speedup: blockade / direct });
    }
    let fit = fit_tau(errors, &tau, fit_window)?;
    let overlay = errors.iter().map(|&e| fit.speedup_overlay(e)).collect();
    let jump_spacing = jump_spacing(&tau, 1.0);
    Ok(SpeedupCurve { model: scan.model, points, tau, tau_half, fit, overlay, jump_spacing })
}

/// Required Stark splitting (rad/s) between targeted and spectator ions:
/// (2 sqrt2 mu0 mu_B^2/(pi^2 hbar r^3)) sqrt(log(N pi^2/(4(1-F_act))) / (1-F_CNOT)).
pub fn stark_detuning_required(n: f64, r: f64, f_act: f64, f_cnot: f64) -> Result<f64> {
    if !(n >= 1.0) || !(r > 0.0) {
        return Err(Error::Input("need N >= 1 and r > 0".into()));
    }
    for f in [f_act, f_cnot] {
        if !(f > 0.0 && f < 1.0) {
            return Err(Error::Input(format!("fidelity {f} outside (0, 1)")));
        }
    }
    let pref = 2.0 * 2f64.sqrt() * MU_0 * MU_B * MU_B / (PI * PI * HBAR * r.powi(3));
    let log = (n * PI * PI / (4.0 * (1.0 - f_act))).ln();
    Ok(pref * (log / (1.0 - f_cnot)).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AddressabilityBudget {
    pub n: f64,
    pub r: f64,
    pub f_act: f64,
    pub f_cnot: f64,
    /// rad/s.
    pub delta_omega_st: f64,
    /// Field difference, V/m.
    pub delta_e: f64,
    /// Hz per (V/m).
    pub stark_coefficient: f64,
}

impl AddressabilityBudget {
    pub fn delta_e_v_per_cm(&self) -> f64 {
        self.delta_e / 100.0
    }
}

/// Stark budget; the coefficient is in Hz per (V/m).
pub fn stark_budget(n: f64, r: f64, f_act: f64, f_cnot: f64, stark_coefficient: f64) -> Result<AddressabilityBudget> {
    if !(stark_coefficient > 0.0) {
        return Err(Error::Input("Stark coefficient must be positive".into()));
    }
    let w = stark_detuning_required(n, r, f_act, f_cnot)?;
    Ok(AddressabilityBudget { n, r, f_act, f_cnot, delta_omega_st: w, delta_e: w / (2.0 * PI * stark_coefficient), stark_coefficient })
}

/// Analytic bound Omega <= dw sqrt(pi/(2 log(pi^2/(4(1-F))))).
pub fn activation_rabi_bound(delta_omega: f64, f_pi: f64) -> Result<f64> {
    if !(f_pi > 0.0 && f_pi < 1.0) {
        return Err(Error::Input(format!("F_pi = {f_pi} outside (0, 1)")));
    }
    let l = (PI * PI / (4.0 * (1.0 - f_pi))).ln();
    if !(l > 0.0) {
        return Err(Error::Input("fidelity too low for the bound".into()));
    }
    Ok(delta_omega * (PI / (2.0 * l)).sqrt())
}

/// Flip probability of a spectator detuned by dw under an untruncated Gaussian
/// pi pulse with peak Rabi frequency x dw (cut at six widths).
pub fn gaussian_spectator_error(x: f64) -> Result<f64> {
    let t = PI.sqrt();
    let p = PulseSpec::new(1.0, t, 6.0 * t, 1.0 / x)?;
    pulse_error_exact(&p)
}

/// Largest Omega0/dw with spectator error below 1 - F_pi, from exact propagation.
pub fn activation_rabi_bound_numeric(f_pi: f64) -> Result<f64> {
    if !(f_pi > 0.0 && f_pi < 1.0) {
        return Err(Error::Input(format!("F_pi = {f_pi} outside (0, 1)")));
    }
    let eps = 1.0 - f_pi;
    let step = 0.005;
    let mut x = step;
    if gaussian_spectator_error(x)? >= eps {
        return Err(Error::Infeasible("threshold not reached even at very weak drive".into()));
    }
    while x < 2.0 {
        let next = x + step;
        if gaussian_spectator_error(next)? >= eps {
            let (mut lo, mut hi) = (x, next);
            for _ in 0..40 {
                let mid = 0.5 * (lo + hi);
                if gaussian_spectator_error(mid)? >= eps {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Ok(lo);
        }
        x = next;
    }
    Err(Error::Infeasible("no crossing below Omega0/dw = 2".into()))
}

/// Magnetic Rabi frequency mu_B B_ac / hbar, rad/s.
pub fn magnetic_rabi(b_ac: f64) -> f64 {
    MU_B * b_ac / HBAR
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RobustnessBudget {
    /// Phase per single-qubit operation on a spectator, rad.
    pub dphi_single: f64,
    /// Deterministic phase per CNOT on a spectator, rad.
    pub dphi_cnot: f64,
    /// Extra suppression of activation-with-spectator-flip, (J/E_Z)^2.
    pub flip_suppression: f64,
    /// Passive-qubit hopping J (A/E_Z)^2, Hz.
    pub j_hop: f64,
    /// Operations until random phases reach O(1): 1/dphi_single^2.
    pub ops_to_error: f64,
    /// Typical dipolar scale used, Hz.
    pub j_dip: f64,
}

/// Order-of-magnitude spectator budget with J = mu0 mu_B^2/(4 pi r^3) and
/// E_Z = mu_B B; `a_j` is A_J/h in Hz.
pub fn robustness_budget(a_j: f64, b_ac: f64, b: f64, r: f64) -> Result<RobustnessBudget> {
    if !(a_j > 0.0 && b_ac > 0.0 && b > 0.0 && r > 0.0) {
        return Err(Error::Input("A_J, B_ac, B and r must be positive".into()));
    }
    let j = MU_0 * MU_B * MU_B / (4.0 * PI * r.powi(3)); // energy
    let e_z = MU_B * b;
    let a = a_j * H;
    let dphi_single = MU_0 * MU_N / (4.0 * PI * r.powi(3) * b_ac);
    // (A/hbar) (J/E_Z)^2 t_CNOT with t_CNOT = pi hbar/(4 J)
    let dphi_cnot = PI * a * j / (4.0 * e_z * e_z);
    Ok(RobustnessBudget {
        dphi_single,
        dphi_cnot,
        flip_suppression: (j / e_z).powi(2),
        j_hop: j * (a / e_z).powi(2) / H,
        ops_to_error: 1.0 / (dphi_single * dphi_single),
        j_dip: j / H,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hull_fit_recovers_line_under_peaks() {
        let eps = log_grid(1e-8, 1e-3, 10);
        let tau: Vec<f64> = eps
            .iter()
            .enumerate()
            .map(|(k, &e)| 1.2 * log_form(e) + 3.0 + if k % 3 == 1 { 2.0 } else { 0.0 })
            .collect();
        let f = fit_tau(&eps, &tau, (1e-8, 1e-3)).unwrap();
        assert!((f.a - 1.2).abs() < 1e-9 && (f.b - 3.0).abs() < 1e-8, "{f:?}");
    }

    #[test]
    fn stark_scalings() {
        let a = stark_detuning_required(1e4, 10e-9, 0.99, 0.99).unwrap();
        let b = stark_detuning_required(1e4, 20e-9, 0.99, 0.99).unwrap();
        assert!((a / b - 8.0).abs() < 1e-12);
        let c = stark_detuning_required(1e4, 10e-9, 0.99, 0.9999).unwrap();
        assert!((c / a - 10.0).abs() < 1e-12);
        assert!(stark_detuning_required(1e4, 10e-9, 0.99, 1.0).is_err());
    }

    #[test]
    fn stark_endpoints() {
        let coef = 35e3 / 100.0;
        let lo = stark_budget(1e4, 10e-9, 0.99, 0.99, coef).unwrap().delta_e_v_per_cm();
        let hi = stark_budget(1e4, 10e-9, 0.9999, 0.9999, coef).unwrap().delta_e_v_per_cm();
        assert!((lo / 50.0 - 1.0).abs() < 0.2 && (hi / 600.0 - 1.0).abs() < 0.2, "{lo} {hi}");
    }

    #[test]
    fn analytic_rabi_bound() {
        let x = activation_rabi_bound(1.0, 1.0 - 1e-6).unwrap();
        assert!((x - 0.33).abs() < 0.01, "{x}");
        assert!((magnetic_rabi(1e-3) / 1e6 - 88.0).abs() < 1.0);
    }

    #[test]
    fn robustness_numbers() {
        let r = robustness_budget(1e9, 1e-3, 1.0, 10e-9).unwrap();
        assert!((r.dphi_single / 5.05e-7 - 1.0).abs() < 0.01);
        assert!(r.ops_to_error > 1e12 && r.ops_to_error < 1e13);
        assert!((r.flip_suppression.log10() + 12.0).abs() < 1.0);
    }

    #[test]
    fn jump_spacing_of_staircase() {
        let tau = [40.0, 39.9, 35.0, 34.8, 34.7, 24.0, 22.0, 20.0, 19.9];
        assert!((jump_spacing(&tau, 1.0).unwrap() - 10.1).abs() < 1e-12);
        assert!(jump_spacing(&[1.0, 1.1], 2.0).is_none());
    }
}
