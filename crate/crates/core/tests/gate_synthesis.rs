use std::f64::consts::PI;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use renq_core::constants::{H, HBAR};
use renq_core::fidelity::{min_gate_fidelity, min_gate_infidelity};
use renq_core::gates::*;
use renq_core::materials::{builtin_material, report_at, CaseStudy};
use renq_core::matrix::{c, identity, kron, sigma_x, sigma_y, sigma_z, CMatrix};

fn zz_hamiltonian(a: f64, b: f64, j: f64) -> CMatrix {
    let one = identity(2);
    kron(&sigma_z(), &one) * c(a, 0.0) + kron(&one, &sigma_z()) * c(b, 0.0) + kron(&sigma_z(), &sigma_z()) * c(j, 0.0)
}

#[test]
fn echo_cancels_random_single_ion_terms() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let target = c_phase_half();
    for _ in 0..100 {
        let j: f64 = rng.random_range(1e3..1e5);
        let (a, b) = (rng.random_range(-1e7..1e7), rng.random_range(-1e7..1e7));
        let h = zz_hamiltonian(a, b, j);
        let u = spin_echo_cphase(&h, j, 0.0).unwrap();
        assert!(min_gate_fidelity(&target, &u).unwrap() >= 1.0 - 1e-10, "a {a} b {b} j {j}");
    }
}

#[test]
fn cnot_time_identity() {
    for j in [1.0, 3.0e4, 2.5e6] {
        // exact in units of h; the tabulated hbar agrees with h/2pi to ~5e-10
        assert!((t_cnot(j) * j - 0.125).abs() < 1e-15);
        assert!((t_cnot(j) * j * H / (PI * HBAR / 4.0) - 1.0).abs() < 1e-9);
    }
}

#[test]
fn resonant_residual_bound_holds() {
    // flip-flop V (|01> <-> |10>) on top of J sz sz over t_CNOT
    let j = 1.0e4;
    let ideal = (zz_hamiltonian(0.0, 0.0, j) * c(0.0, -2.0 * PI * t_cnot(j))).exp();
    for ratio in [0.005, 0.01, 0.02, 0.05] {
        let v = ratio * j;
        let ff = (kron(&sigma_x(), &sigma_x()) + kron(&sigma_y(), &sigma_y())) * c(v / 2.0, 0.0);
        let u = ((zz_hamiltonian(0.0, 0.0, j) + ff) * c(0.0, -2.0 * PI * t_cnot(j))).exp();
        let got = min_gate_infidelity(&ideal, &u).unwrap();
        let bound = fidelity_bound_resonant(v, j);
        assert!(bound.warning.is_none());
        assert!(got <= 4.0 * bound.infidelity(), "V/J {ratio}: {got:e} vs {:e}", bound.infidelity());
        assert!(got >= 0.25 * bound.infidelity());
    }
    assert!(fidelity_bound_resonant(0.5, 1.0).warning.is_some());
}

#[test]
fn offresonant_residual_bound_holds() {
    // two levels split by delta, coupled by V: worst leakage over a long window
    let delta = 1.0e6;
    for ratio in [0.005, 0.01, 0.02, 0.05] {
        let v = ratio * delta;
        let h = sigma_z() * c(delta / 2.0, 0.0) + sigma_x() * c(v, 0.0);
        let mut worst: f64 = 0.0;
        for k in 1..400 {
            let u = (&h * c(0.0, -2.0 * PI * k as f64 * 2.5e-9)).exp();
            worst = worst.max(u[(1, 0)].norm_sqr());
        }
        let bound = fidelity_bound_offresonant(v, delta).infidelity();
        assert!(worst <= 4.0 * bound && worst >= 0.25 * bound, "V/d {ratio}: {worst:e} vs {bound:e}");
        assert!((two_level_max_transfer(v, delta) - worst).abs() < 1e-3 * worst);
    }
}

#[test]
fn report_error_monotone_in_t2_and_activation_time() {
    let m = builtin_material("er-yso-site1").unwrap();
    let (th, ph) = (35f64.to_radians(), 132f64.to_radians());
    let mut prev = 0.0;
    for t2 in [1e-1, 1e-2, 4.4e-3, 1e-3, 1e-4] {
        let mut mm = m.clone();
        mm.ion.t2_excited = t2;
        let e = report_at(&mm, &CaseStudy::new(10e-9, 1.0, 1e-3).unwrap(), th, ph).unwrap().total_error;
        assert!(e >= prev, "T2 {t2}");
        prev = e;
    }
    // weaker drive, longer activation
    let mut prev = 0.0;
    for b_ac in [1e-2, 3e-3, 1e-3, 3e-4, 1e-4] {
        let r = report_at(&m, &CaseStudy::new(10e-9, 1.0, b_ac).unwrap(), th, ph).unwrap();
        assert!(r.total_error >= prev, "B_ac {b_ac}");
        prev = r.total_error;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn echo_with_short_timed_x_layers(a in -1e6f64..1e6, b in -1e6f64..1e6, j in 1e3f64..1e5) {
        // finite X layers perturb the ideal echo by at most O((t_x J)^2 + (t_x a)^2)
        let h = zz_hamiltonian(a, b, j);
        let tx = 1e-12;
        let u = spin_echo_cphase(&h, j, tx).unwrap();
        let f = min_gate_fidelity(&c_phase_half(), &u).unwrap();
        prop_assert!(f > 1.0 - 1e-6);
    }
}
