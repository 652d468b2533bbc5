use core::f64::consts::PI;

use kitaev_core::hamiltonian::{CouplingParams, Engine};
use kitaev_core::lattice::build_lattice;
use kitaev_core::manifold::{excite, FlipConfig, StateLabel};
use kitaev_core::perturbation::{
    coefficient_closed_form, coefficient_quadrature, connected_targets, evolve_coefficients, uniform_grid, DriveProfile,
    DriveSpec, EvolveOptions,
};
use num_complex::Complex64;
use proptest::prelude::*;

const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

#[test]
fn closed_form_matches_quadrature_off_resonance() {
    let omega = 0.5;
    let mut worst: f64 = 0.0;
    for d in [0.1, 1.0] {
        for delta in [0.5, 1.0, 2.3] {
            let drive = DriveProfile::Exponential { d, omega };
            for k in 0..=80 {
                let x = 0.1 + (20.0 - 0.1) * k as f64 / 80.0;
                let t = x / delta;
                let cf = coefficient_closed_form(ONE, d, delta, t);
                let q = coefficient_quadrature(ONE, &drive, delta + omega, t, 1e-14).unwrap();
                worst = worst.max((q - cf).norm() / cf.norm());
            }
        }
    }
    assert!(worst < 1e-8, "worst relative error {worst}");
}

#[test]
fn resonance_branch_matches_quadrature() {
    for &(delta, t) in &[(0.0, 1.0), (1e-8, 3.0), (-2e-5, 4.0), (9e-5, 1.0)] {
        let drive = DriveProfile::Exponential { d: 1.0, omega: 0.3 };
        let cf = coefficient_closed_form(ONE, 1.0, delta, t);
        let q = coefficient_quadrature(ONE, &drive, delta + 0.3, t, 1e-13).unwrap();
        assert!((q - cf).norm() < 1e-10, "delta={delta} t={t}");
    }
    let c = coefficient_quadrature(ONE, &DriveProfile::Exponential { d: 1.0, omega: 1.0 }, 1.0 + 1e-8, 1.0, 1e-12).unwrap();
    assert!((c - Complex64::new(0.0, -1.0)).norm() < 1e-8);
}

#[test]
fn quadrature_examples() {
    let drive = DriveProfile::Exponential { d: 1.0, omega: 0.0 };
    let c = coefficient_quadrature(ONE, &drive, 1.0, PI, 1e-10).unwrap();
    assert!((c - Complex64::new(2.0, 0.0)).norm() < 1e-9);
    assert_eq!(coefficient_quadrature(ONE, &drive, 1.0, 0.0, 1e-10).unwrap(), Complex64::new(0.0, 0.0));
    let constant = DriveProfile::Sampled { times: vec![0.0], values: vec![Complex64::new(0.3, 0.0)] };
    let c = coefficient_quadrature(ONE, &constant, 0.0, 2.0, 1e-12).unwrap();
    assert!((c - Complex64::new(0.0, -0.6)).norm() < 1e-12);
}

fn two_by_two_run(d: f64, profile: fn(f64) -> DriveProfile) -> kitaev_core::perturbation::Evolution {
    let g = build_lattice(2, 2).unwrap();
    let params = CouplingParams::isotropic(1.0);
    let empty = FlipConfig::empty(4);
    let targets: Vec<_> = (0..4).map(|i| excite(&empty, i).unwrap()).collect();
    let drive = DriveSpec { plaquette: 0, profile: profile(d) };
    evolve_coefficients(&g, &params, &drive, &empty, &targets, &uniform_grid(10.0, 101), EvolveOptions::default()).unwrap()
}

#[test]
fn zero_drive_leaves_targets_empty() {
    let ev = two_by_two_run(0.0, |d| DriveProfile::Exponential { d, omega: 0.4 });
    assert!(ev.targets.iter().all(|s| s.is_zero()));
    assert!(ev.initial.values.iter().all(|&c| c == ONE));
}

#[test]
fn only_connected_targets_move() {
    let ev = two_by_two_run(0.05, |d| DriveProfile::Exponential { d, omega: 0.4 });
    let moving: Vec<_> = ev.targets.iter().filter(|s| !s.is_zero()).map(|s| s.target.clone()).collect();
    assert_eq!(moving, vec![StateLabel::Excited(excite(&FlipConfig::empty(4), 0).unwrap())]);
    let g = build_lattice(2, 2).unwrap();
    let found = connected_targets(&g, &FlipConfig::empty(4), 0, Engine::Label).unwrap();
    assert_eq!(found, vec![excite(&FlipConfig::empty(4), 0).unwrap()]);
}

#[test]
fn first_order_weight_scales_quadratically() {
    for profile in [
        (|d| DriveProfile::Exponential { d, omega: 0.4 }) as fn(f64) -> DriveProfile,
        |d| DriveProfile::Harmonic { d, omega: 0.4 },
    ] {
        let full = two_by_two_run(0.02, profile).first_order_weight();
        let half = two_by_two_run(0.01, profile).first_order_weight();
        for (a, b) in full.iter().zip(&half).skip(1) {
            assert!((a / b / 4.0 - 1.0).abs() < 0.01);
        }
    }
}

#[test]
fn sampled_series_matches_direct_quadrature() {
    let ev = two_by_two_run(0.1, |d| DriveProfile::Harmonic { d, omega: 0.7 });
    let s = &ev.targets[0];
    let drive = DriveProfile::Harmonic { d: 0.1, omega: 0.7 };
    for k in [10, 55, 100] {
        let want = coefficient_quadrature(s.element / 0.1, &drive, s.omega0(), s.times[k], 1e-12).unwrap();
        assert!((s.values[k] - want).norm() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn doubling_d_doubles_c(d in 1e-3f64..2.0, delta in -5.0f64..5.0, t in 0.0f64..30.0) {
        let a = coefficient_closed_form(ONE, d, delta, t);
        prop_assert_eq!(coefficient_closed_form(ONE, 2.0 * d, delta, t), a * 2.0);
    }

    #[test]
    fn modulus_is_periodic(delta in 0.2f64..4.0, t in 0.0f64..10.0) {
        let period = 2.0 * PI / delta;
        let a = coefficient_closed_form(ONE, 1.0, delta, t).norm_sqr();
        let b = coefficient_closed_form(ONE, 1.0, delta, t + period).norm_sqr();
        prop_assert!((a - b).abs() < 1e-10);
    }
}
