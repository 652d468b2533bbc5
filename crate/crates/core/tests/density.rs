use core::f64::consts::{LN_2, PI};

use kitaev_core::density::{
    assemble_state, density_matrix, reduced_entropy, thermal_mix, thermal_weights, Basis, PureState, Temperature,
    WeightFunction,
};
use kitaev_core::ket::{HilbertCap, Ket};
use kitaev_core::lattice::{build_lattice, Sublattice};
use kitaev_core::manifold::{excite, label_ket, FlipConfig, StateLabel};
use kitaev_core::perturbation::{coefficient_closed_form, uniform_grid, CoefficientSeries, Evolution};
use kitaev_core::phase::decompose;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const CAP: HilbertCap = HilbertCap(16);

fn series(target: StateLabel, e: f64, d: f64, delta: f64) -> CoefficientSeries {
    let times = uniform_grid(6.0, 61);
    let values = times.iter().map(|&t| coefficient_closed_form(Complex64::new(1.0, 0.0), d, delta, t)).collect();
    CoefficientSeries { target, e_target: e, e_initial: 0.3, element: Complex64::new(d, 0.0), times, values }
}

/// Initial state plus two targets with distinct energies and detunings.
fn evolution() -> Evolution {
    let empty = FlipConfig::empty(4);
    let times = uniform_grid(6.0, 61);
    let initial = CoefficientSeries {
        target: StateLabel::Ground(empty.clone()),
        e_target: 0.3,
        e_initial: 0.3,
        element: Complex64::new(0.0, 0.0),
        values: vec![Complex64::new(1.0, 0.0); times.len()],
        times,
    };
    Evolution {
        initial,
        targets: vec![
            series(StateLabel::Excited(excite(&empty, 0).unwrap()), 1.1, 0.05, 0.8),
            series(StateLabel::Excited(excite(&empty, 1).unwrap()), -0.4, 0.08, -0.7),
        ],
    }
}

fn random_unit_ket(rng: &mut StdRng, n: usize) -> Ket {
    let amps = (0..1usize << n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    Ket::from_amplitudes(n, amps).unwrap().normalized()
}

#[test]
fn assembled_state_is_normalized_and_keeps_ratios() {
    let ev = evolution();
    for t in [0.0, 1.2, 6.0] {
        let s = assemble_state(&ev, t).unwrap();
        assert!((s.state.norm() - 1.0).abs() < 1e-12);
        if t > 0.0 {
            let k = ev.targets[0].index_of(t).unwrap();
            let ratio = s.state.amplitudes[1] / s.state.amplitudes[2];
            let phases = Complex64::new(0.0, -(1.1 - -0.4) * t).exp();
            let want = ev.targets[0].values[k] / ev.targets[1].values[k] * phases;
            assert!((ratio - want).norm() < 1e-12 * want.norm());
        }
    }
}

#[test]
fn density_matrix_carries_phase_pattern() {
    let ev = evolution();
    let phases: Vec<_> = ev.all_series().map(|s| decompose(s, None).unwrap()).collect();
    let t = 2.3;
    let s = assemble_state(&ev, t).unwrap();
    let rho = density_matrix(&s.state).unwrap();
    assert!(rho.hermiticity_error() < 1e-12);
    assert!((rho.trace() - 1.0).abs() < 1e-12);
    assert!((rho.purity() - 1.0).abs() < 1e-12);
    assert!(rho.eigenvalues().iter().all(|&l| l > -1e-10));
    let k = ev.initial.index_of(t).unwrap();
    let norm2 = s.normalization * s.normalization;
    for m in 0..3 {
        assert!((rho.entries[(m, m)].re - phases[m].modulus[k].powi(2) / norm2).abs() < 1e-12);
        for n in 0..3 {
            if m == n {
                continue;
            }
            let want = phases[m].phase[k] - phases[n].phase[k] + (s.energies[n] - s.energies[m]) * t;
            let got = rho.entries[(m, n)].arg();
            let diff = (got - want).rem_euclid(2.0 * PI);
            assert!(diff.min(2.0 * PI - diff) < 1e-10, "({m},{n})");
        }
    }
}

#[test]
fn constant_phase_shift_moves_only_one_row_and_column() {
    let ev = evolution();
    let s = assemble_state(&ev, 3.1).unwrap().state;
    let rho = density_matrix(&s).unwrap();
    let theta = 0.77;
    let mut shifted = s.clone();
    shifted.amplitudes[1] *= Complex64::from_polar(1.0, theta);
    let rho2 = density_matrix(&shifted).unwrap();
    for m in 0..3 {
        for n in 0..3 {
            let rot = match (m == 1, n == 1) {
                (true, false) => Complex64::from_polar(1.0, theta),
                (false, true) => Complex64::from_polar(1.0, -theta),
                _ => Complex64::new(1.0, 0.0),
            };
            assert!((rho2.entries[(m, n)] - rho.entries[(m, n)] * rot).norm() < 1e-14);
        }
    }
    let mut global = s.clone();
    global.amplitudes.iter_mut().for_each(|a| *a *= Complex64::from_polar(1.0, 1.9));
    let rho3 = density_matrix(&global).unwrap();
    assert!((rho3.entries.clone() - rho.entries.clone()).iter().all(|z| z.norm() < 1e-15));
}

#[test]
fn manifold_kets_have_zero_entropy() {
    let g = build_lattice(2, 2).unwrap();
    for bits in [0u64, 5, 15] {
        let c = FlipConfig::from_u64(4, bits).unwrap();
        for label in [StateLabel::Ground(c.clone()), StateLabel::Excited(excite(&c, 2).unwrap())] {
            let ket = label_ket(&g, &label, CAP).unwrap();
            let (rho, s) = reduced_entropy(&g, &ket, Sublattice::A, CAP).unwrap();
            assert!(s.abs() < 1e-10);
            assert!((rho.trace() - 1.0).abs() < 1e-10);
        }
    }
}

#[test]
fn random_kets_have_symmetric_bounded_entropy() {
    let g = build_lattice(2, 2).unwrap();
    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..6 {
        let ket = random_unit_ket(&mut rng, 8);
        let (rho_a, sa) = reduced_entropy(&g, &ket, Sublattice::A, CAP).unwrap();
        let (_, sb) = reduced_entropy(&g, &ket, Sublattice::B, CAP).unwrap();
        assert!((sa - sb).abs() < 1e-9);
        assert!(sa >= 0.0 && sa <= 4.0 * LN_2 + 1e-12);
        assert!(rho_a.eigenvalues().iter().all(|&l| l > -1e-10));
    }
}

#[test]
fn thermal_mixture_of_distinct_states_is_mixed() {
    let g = build_lattice(2, 2).unwrap();
    let members: Vec<(f64, PureState)> = [0u64, 3, 9]
        .iter()
        .enumerate()
        .map(|(k, &bits)| {
            let ket = label_ket(&g, &StateLabel::Ground(FlipConfig::from_u64(4, bits).unwrap()), CAP).unwrap();
            (k as f64 * 0.5, PureState::from_ket(&ket))
        })
        .collect();
    let ens = thermal_mix(&members, Temperature::Finite(0.7), WeightFunction::Boltzmann).unwrap();
    assert!(ens.rho.purity() < 1.0 - 1e-6);
    assert!((ens.rho.trace() - 1.0).abs() < 1e-12);
    assert!(ens.rho.hermiticity_error() < 1e-14);
    assert_eq!(ens.rho.basis, Basis::Hilbert { n_sites: 8 });
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn weights_normalized_and_shift_invariant(
        energies in proptest::collection::vec(-50.0f64..50.0, 1..12),
        kt in 0.05f64..20.0,
        shift in -1e3f64..1e3,
    ) {
        let p = thermal_weights(&energies, Temperature::Finite(kt), WeightFunction::Boltzmann).unwrap();
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let moved: Vec<f64> = energies.iter().map(|e| e + shift).collect();
        let q = thermal_weights(&moved, Temperature::Finite(kt), WeightFunction::Boltzmann).unwrap();
        for (a, b) in p.iter().zip(&q) {
            prop_assert!((a - b).abs() < 1e-9);
        }
    }
}
