//! Exact Schrödinger evolution `i∂ψ/∂t = (H0 + B(t)·S)ψ` in the full site
//! Hilbert space, projection onto manifold kets and TDPT error studies.

use alloc::vec::Vec;

use num_complex::Complex64;
// Float math for no_std builds; std provides the inherent methods when linked.
#[allow(unused_imports)]
use num_traits::Float;

use crate::hamiltonian::{drive_operator, CouplingParams, KitaevHamiltonian};
use crate::integrator::{integrate_adaptive, integrate_fixed, AdaptiveOptions, StepStats};
use crate::ket::{HilbertCap, Ket};
use crate::lattice::LatticeGeometry;
use crate::manifold::{label_ket, ExcitedLabel, FlipConfig, StateLabel};
use crate::pauli::PauliString;
use crate::perturbation::{evolve_coefficients, CoefficientSeries, DriveSpec, Evolution, EvolveOptions};
use crate::{Error, Result};

/// Bound on `|‖ψ(t)‖ − ‖ψ(0)‖|` for Hermitian generators.
pub const NORM_DRIFT_BOUND: f64 = 1e-8;
pub const PRODUCTION_TOL: f64 = 1e-9;
pub const REFERENCE_TOL: f64 = 1e-12;
const ORTHONORMAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOptions {
    pub tol: f64,
    pub cap: HilbertCap,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self { tol: PRODUCTION_TOL, cap: HilbertCap::default() }
    }
}

/// Time-dependent generator `−i(H0 + B(t)·S)`.
pub struct Generator {
    h0: KitaevHamiltonian,
    drive_string: PauliString,
    drive: DriveSpec,
}

impl Generator {
    pub fn new(geom: &LatticeGeometry, params: &CouplingParams, drive: &DriveSpec) -> Result<Self> {
        params.validate()?;
        drive.validate(geom)?;
        Ok(Self {
            h0: KitaevHamiltonian::new(geom, params),
            drive_string: drive_operator(geom, drive.plaquette)?,
            drive: drive.clone(),
        })
    }

    /// `dy = −i·H(t)·y`.
    pub fn rhs(&self, t: f64, y: &[Complex64], dy: &mut [Complex64]) {
        let minus_i = Complex64::new(0.0, -1.0);
        dy.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        self.h0.apply_add(minus_i, y, dy);
        let b = self.drive.profile.amplitude(t);
        if b != Complex64::new(0.0, 0.0) {
            self.drive_string.apply_add(minus_i * b, y, dy);
        }
    }

    pub fn is_hermitian(&self) -> bool {
        self.drive.profile.is_hermitian()
    }

    /// `⟨ψ|H0|ψ⟩/⟨ψ|ψ⟩`.
    pub fn h0_expectation(&self, y: &[Complex64]) -> f64 {
        let mut hy = alloc::vec![Complex64::new(0.0, 0.0); y.len()];
        self.h0.apply_add(Complex64::new(1.0, 0.0), y, &mut hy);
        crate::ket::inner(y, &hy).re / crate::ket::inner(y, y).re
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionResult {
    pub times: Vec<f64>,
    pub kets: Vec<Ket>,
    /// `max_t |‖ψ(t)‖ − ‖ψ(0)‖|`.
    pub norm_drift: f64,
    /// `max_t |⟨H0⟩(t) − ⟨H0⟩(0)|`, for undriven runs.
    pub energy_drift: Option<f64>,
    pub stats: StepStats,
}

/// Integrates from any `psi0`, without normalization or drift checks.
pub fn propagate(
    geom: &LatticeGeometry,
    params: &CouplingParams,
    drive: &DriveSpec,
    psi0: &Ket,
    times: &[f64],
    opts: OracleOptions,
) -> Result<EvolutionResult> {
    opts.cap.check(geom.n_sites())?;
    psi0.require_dim(geom.n_sites())?;
    let gen = Generator::new(geom, params, drive)?;
    let (ys, stats) = integrate_adaptive(
        |t, y, dy| gen.rhs(t, y, dy),
        psi0.amplitudes(),
        times,
        AdaptiveOptions { tol: opts.tol, ..AdaptiveOptions::default() },
    )?;
    let n0 = psi0.norm();
    let norm_drift = ys.iter().map(|y| (crate::ket::norm(y) - n0).abs()).fold(0.0, f64::max);
    let energy_drift = (drive.profile.scale() == 0.0 && n0 > 0.0).then(|| {
        let e0 = gen.h0_expectation(&ys[0]);
        ys.iter().map(|y| (gen.h0_expectation(y) - e0).abs()).fold(0.0, f64::max)
    });
    let n = geom.n_sites();
    let kets = ys.into_iter().map(|y| Ket::from_amplitudes(n, y)).collect::<Result<Vec<_>>>()?;
    Ok(EvolutionResult { times: times.to_vec(), kets, norm_drift, energy_drift, stats })
}

/// Evolves a unit `psi0`. Runs with a Hermitian generator are rejected when
/// the norm drifts by more than [`NORM_DRIFT_BOUND`]; for a complex drive
/// amplitude the norm is not conserved and the drift is only reported.
pub fn exact_evolve(
    geom: &LatticeGeometry,
    params: &CouplingParams,
    drive: &DriveSpec,
    psi0: &Ket,
    times: &[f64],
    opts: OracleOptions,
) -> Result<EvolutionResult> {
    psi0.require_unit(1e-12)?;
    let r = propagate(geom, params, drive, psi0, times, opts)?;
    if drive.profile.is_hermitian() && r.norm_drift > NORM_DRIFT_BOUND {
        return Err(Error::NormDrift { drift: r.norm_drift, bound: NORM_DRIFT_BOUND });
    }
    Ok(r)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BasisEntry {
    pub label: StateLabel,
    pub ket: Ket,
    pub energy: f64,
}

/// Manifold kets for every series of `evolution`, with the series energies.
pub fn active_basis(geom: &LatticeGeometry, evolution: &Evolution, cap: HilbertCap) -> Result<Vec<BasisEntry>> {
    evolution
        .all_series()
        .map(|s| Ok(BasisEntry { label: s.target.clone(), ket: label_ket(geom, &s.target, cap)?, energy: s.e_target }))
        .collect()
}

/// Largest `|⟨b_i|b_j⟩ − δ_ij|`.
pub fn orthonormality_deviation(basis: &[BasisEntry]) -> f64 {
    let mut dev: f64 = 0.0;
    for (i, a) in basis.iter().enumerate() {
        for (j, b) in basis.iter().enumerate().skip(i) {
            let want = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((a.ket.inner(&b.ket) - want).norm());
        }
    }
    dev
}

#[derive(Debug, Clone, PartialEq)]
pub struct TargetError {
    pub label: StateLabel,
    pub max_error: f64,
    /// `max_t |c_tdpt|`, the scale of the compared coefficient.
    pub max_modulus: f64,
    pub exact: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub targets: Vec<TargetError>,
}

impl ComparisonReport {
    /// Largest error over every compared state, the initial one included.
    pub fn max_error(&self) -> f64 {
        self.targets.iter().map(|t| t.max_error).fold(0.0, f64::max)
    }
}

/// Interaction-picture coefficients `⟨b_m|ψ(t)⟩·e^{+iE_m t}` compared with the
/// TDPT series of the same label.
pub fn project_and_compare(result: &EvolutionResult, basis: &[BasisEntry], tdpt: &Evolution) -> Result<ComparisonReport> {
    let deviation = orthonormality_deviation(basis);
    if deviation > ORTHONORMAL_TOL {
        return Err(Error::NotOrthonormal { deviation });
    }
    if result.times.len() != tdpt.times().len()
        || result.times.iter().zip(tdpt.times()).any(|(a, b)| (a - b).abs() > 1e-12 * a.abs().max(1.0))
    {
        return Err(Error::BadTimeGrid);
    }
    let mut targets = Vec::new();
    for series in tdpt.all_series() {
        let entry = basis.iter().find(|b| b.label == series.target).ok_or(Error::BasisMismatch)?;
        targets.push(compare_series(result, entry, series));
    }
    Ok(ComparisonReport { targets })
}

fn compare_series(result: &EvolutionResult, entry: &BasisEntry, series: &CoefficientSeries) -> TargetError {
    let exact: Vec<Complex64> = result
        .kets
        .iter()
        .zip(&result.times)
        .map(|(psi, &t)| entry.ket.inner(psi) * Complex64::new(0.0, entry.energy * t).exp())
        .collect();
    let max_error = exact.iter().zip(&series.values).map(|(e, c)| (e - c).norm()).fold(0.0, f64::max);
    let max_modulus = series.values.iter().map(|c| c.norm()).fold(0.0, f64::max);
    TargetError { label: series.target.clone(), max_error, max_modulus, exact }
}

/// TDPT and exact evolution for one drive amplitude.
pub fn compare_at_amplitude(
    geom: &LatticeGeometry,
    params: &CouplingParams,
    drive: &DriveSpec,
    initial: &FlipConfig,
    targets: &[ExcitedLabel],
    times: &[f64],
    evolve: EvolveOptions,
    oracle: OracleOptions,
) -> Result<ComparisonReport> {
    let tdpt = evolve_coefficients(geom, params, drive, initial, targets, times, evolve)?;
    let basis = active_basis(geom, &tdpt, oracle.cap)?;
    let psi0 = basis[0].ket.clone();
    let result = exact_evolve(geom, params, drive, &psi0, times, oracle)?;
    project_and_compare(&result, &basis, &tdpt)
}

/// `(D, max error)` for each amplitude `D`, scaling the drive profile.
pub fn d_scaling(
    geom: &LatticeGeometry,
    params: &CouplingParams,
    drive: &DriveSpec,
    amplitudes: &[f64],
    initial: &FlipConfig,
    targets: &[ExcitedLabel],
    times: &[f64],
    evolve: EvolveOptions,
    oracle: OracleOptions,
) -> Result<Vec<(f64, f64)>> {
    let base = drive.profile.scale();
    if !(base > 0.0) {
        return Err(Error::InvalidParameter("D-scaling needs a drive with non-zero amplitude".into()));
    }
    amplitudes
        .iter()
        .map(|&d| {
            let scaled = DriveSpec { plaquette: drive.plaquette, profile: drive.profile.scaled(d / base) };
            let r = compare_at_amplitude(geom, params, &scaled, initial, targets, times, evolve, oracle)?;
            Ok((d, r.max_error()))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceStudy {
    pub steps: [usize; 2],
    /// `‖ψ_h(t_end) − ψ_ref(t_end)‖₂` for each step count.
    pub errors: [f64; 2],
    /// `errors[0] / errors[1]`.
    pub ratio: f64,
    /// `log2(ratio)`.
    pub observed_order: f64,
}

/// Fixed-step runs with `base_steps` and `2·base_steps` steps against an
/// adaptive reference at [`REFERENCE_TOL`].
pub fn convergence_study(
    geom: &LatticeGeometry,
    params: &CouplingParams,
    drive: &DriveSpec,
    psi0: &Ket,
    t_end: f64,
    base_steps: usize,
    cap: HilbertCap,
) -> Result<ConvergenceStudy> {
    if base_steps == 0 || !(t_end > 0.0) {
        return Err(Error::InvalidParameter("convergence study needs t_end > 0 and at least one step".into()));
    }
    let reference = propagate(geom, params, drive, psi0, &[0.0, t_end], OracleOptions { tol: REFERENCE_TOL, cap })?;
    let y_ref = reference.kets[1].amplitudes();
    let gen = Generator::new(geom, params, drive)?;
    let steps = [base_steps, 2 * base_steps];
    let errors = steps.map(|n| {
        let y = integrate_fixed(|t, y, dy| gen.rhs(t, y, dy), psi0.amplitudes(), 0.0, t_end, n);
        y.iter().zip(y_ref).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
    });
    let ratio = errors[0] / errors[1];
    Ok(ConvergenceStudy { steps, errors, ratio, observed_order: ratio.log2() })
}
