use core::f64::consts::PI;

use kitaev_core::hamiltonian::{dense_h0, CouplingParams};
use kitaev_core::ket::{HilbertCap, Ket};
use kitaev_core::lattice::build_lattice;
use kitaev_core::manifold::{excite, label_ket, FlipConfig, StateLabel};
use kitaev_core::oracle::{
    convergence_study, d_scaling, exact_evolve, propagate, OracleOptions, REFERENCE_TOL,
};
use kitaev_core::perturbation::{uniform_grid, DriveProfile, DriveSpec, EvolveOptions};
use num_complex::Complex64;

const CAP: HilbertCap = HilbertCap(16);

fn reference() -> OracleOptions {
    OracleOptions { tol: REFERENCE_TOL, cap: CAP }
}

fn anisotropic() -> CouplingParams {
    CouplingParams { jx: 1.0, jy: 0.6, jz: 0.3, d: 0.0, omega: 1.0 }
}

#[test]
fn h0_eigenvector_is_stationary() {
    let g = build_lattice(2, 2).unwrap();
    let p = anisotropic();
    let eig = dense_h0(&g, &p, CAP).unwrap().symmetric_eigen();
    let times = uniform_grid(3.0, 7);
    for k in [0, 37, 255] {
        let v = Ket::from_amplitudes(8, eig.eigenvectors.column(k).iter().copied().collect()).unwrap().normalized();
        let e = eig.eigenvalues[k];
        let r = exact_evolve(&g, &p, &DriveSpec::exponential(0, 0.0, 1.0), &v, &times, reference()).unwrap();
        for (psi, &t) in r.kets.iter().zip(&times) {
            let want = v.scaled(Complex64::new(0.0, -e * t).exp());
            let diff: f64 = psi.amplitudes().iter().zip(want.amplitudes()).map(|(a, b)| (a - b).norm_sqr()).sum();
            assert!(diff.sqrt() < 1e-8, "eigenvector {k} at t={t}");
        }
    }
}

#[test]
fn propagation_is_linear() {
    let g = build_lattice(2, 2).unwrap();
    let drive = DriveSpec { plaquette: 1, profile: DriveProfile::Harmonic { d: 0.2, omega: 0.9 } };
    let psi0 = label_ket(&g, &StateLabel::Ground(FlipConfig::from_u64(4, 6).unwrap()), CAP).unwrap();
    let a = Complex64::new(-0.6, 1.7);
    let times = uniform_grid(2.0, 5);
    let r1 = propagate(&g, &anisotropic(), &drive, &psi0, &times, reference()).unwrap();
    let r2 = propagate(&g, &anisotropic(), &drive, &psi0.scaled(a), &times, reference()).unwrap();
    for (x, y) in r1.kets.iter().zip(&r2.kets) {
        for (u, v) in x.amplitudes().iter().zip(y.amplitudes()) {
            assert!((u * a - v).norm() < 1e-10);
        }
    }
}

#[test]
fn hermitian_drive_conserves_norm_over_a_period() {
    let g = build_lattice(2, 2).unwrap();
    let drive = DriveSpec { plaquette: 0, profile: DriveProfile::Harmonic { d: 0.01, omega: 1.0 } };
    let psi0 = label_ket(&g, &StateLabel::Ground(FlipConfig::empty(4)), CAP).unwrap();
    let r = exact_evolve(&g, &CouplingParams::isotropic(1.0), &drive, &psi0, &uniform_grid(2.0 * PI, 101), reference()).unwrap();
    assert!(r.norm_drift < 1e-9, "drift {}", r.norm_drift);
}

fn criterion_targets() -> (FlipConfig, Vec<kitaev_core::manifold::ExcitedLabel>) {
    let empty = FlipConfig::empty(4);
    let targets = (0..4).map(|i| excite(&empty, i).unwrap()).collect();
    (empty, targets)
}

#[test]
fn tdpt_error_scales_as_d_squared() {
    let g = build_lattice(2, 2).unwrap();
    let p = CouplingParams { jx: 0.0, jy: 0.0, jz: 0.0, d: 0.01, omega: 1.0 };
    let (empty, targets) = criterion_targets();
    let times = uniform_grid(2.0 * PI, 201);
    let drive = DriveSpec::exponential(0, 0.01, 1.0);
    let pts = d_scaling(&g, &p, &drive, &[0.02, 0.01], &empty, &targets, &times, EvolveOptions::default(), reference()).unwrap();
    let ratio = pts[0].1 / pts[1].1;
    assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
    // Frozen from the reference integrator at D = 0.01.
    let frozen = 2.000_066_667_577_9e-4;
    assert!((pts[1].1 / frozen - 1.0).abs() < 1e-6, "error {}", pts[1].1);
}

#[test]
fn fixed_step_runs_converge_at_fifth_order() {
    let g = build_lattice(2, 2).unwrap();
    let drive = DriveSpec { plaquette: 0, profile: DriveProfile::Harmonic { d: 0.01, omega: 1.0 } };
    let psi0 = label_ket(&g, &StateLabel::Ground(FlipConfig::empty(4)), CAP).unwrap();
    let study = convergence_study(&g, &CouplingParams::isotropic(1.0), &drive, &psi0, 1.0, 32, CAP).unwrap();
    assert!(study.ratio >= 15.0, "ratio {}", study.ratio);
    assert!(study.observed_order > 4.5);
}
