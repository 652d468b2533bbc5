//! Evolved states, density matrices, sublattice entanglement entropy and
//! thermal mixtures.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;
// Float math for no_std builds; std provides the inherent methods when linked.
#[allow(unused_imports)]
use num_traits::Float;

use crate::ket::{HilbertCap, Ket};
use crate::lattice::{LatticeGeometry, Sublattice};
use crate::manifold::{label_ket, StateLabel};
use crate::perturbation::Evolution;
use crate::{Error, Result};

/// Eigenvalues below this contribute nothing to the entropy.
pub const ENTROPY_EIGEN_FLOOR: f64 = 1e-14;

const UNIT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Basis {
    /// Active basis of manifold labels.
    Labels(Vec<StateLabel>),
    /// Computational basis of `n_sites` spins, site `k` on bit `k`.
    Hilbert { n_sites: usize },
}

impl Basis {
    pub fn dim(&self) -> usize {
        match self {
            Basis::Labels(l) => l.len(),
            Basis::Hilbert { n_sites } => 1 << n_sites,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    pub basis: Basis,
    pub amplitudes: Vec<Complex64>,
}

impl PureState {
    pub fn norm(&self) -> f64 {
        crate::ket::norm(&self.amplitudes)
    }

    pub fn from_ket(ket: &Ket) -> Self {
        Self { basis: Basis::Hilbert { n_sites: ket.n_sites() }, amplitudes: ket.amplitudes().to_vec() }
    }

    /// Re-expresses a label-basis state in `labels`, which must contain every
    /// label carrying non-zero amplitude.
    pub fn embed(&self, labels: &[StateLabel]) -> Result<Self> {
        let Basis::Labels(own) = &self.basis else {
            return Err(Error::BasisMismatch);
        };
        let mut amps = vec![Complex64::new(0.0, 0.0); labels.len()];
        for (l, &a) in own.iter().zip(&self.amplitudes) {
            match labels.iter().position(|x| x == l) {
                Some(k) => amps[k] += a,
                None if a.norm() == 0.0 => {}
                None => return Err(Error::BasisMismatch),
            }
        }
        Ok(Self { basis: Basis::Labels(labels.to_vec()), amplitudes: amps })
    }

    /// Spin-space ket `Σ_m a_m·|m⟩`, each label expanded to its product ket.
    pub fn to_ket(&self, geom: &LatticeGeometry, cap: HilbertCap) -> Result<Ket> {
        match &self.basis {
            Basis::Hilbert { n_sites } => Ket::from_amplitudes(*n_sites, self.amplitudes.clone()),
            Basis::Labels(labels) => {
                cap.check(geom.n_sites())?;
                let mut out = Ket::zeros(geom.n_sites());
                for (l, &a) in labels.iter().zip(&self.amplitudes) {
                    out.axpy(a, &label_ket(geom, l, cap)?);
                }
                Ok(out)
            }
        }
    }
}

/// Normalized state at one time sample.
#[derive(Debug, Clone, PartialEq)]
pub struct AssembledState {
    pub state: PureState,
    pub energies: Vec<f64>,
    /// Norm of the unnormalized superposition.
    pub normalization: f64,
}

/// `ψ(t) ∝ Σ_m c_m(t)·e^{−iE_m t}|m⟩` over the initial state (`c = 1`) and the
/// targets, normalized.
pub fn assemble_state(evolution: &Evolution, t: f64) -> Result<AssembledState> {
    let mut labels = Vec::new();
    let mut energies = Vec::new();
    let mut amps = Vec::new();
    for s in evolution.all_series() {
        let k = s.index_of(t)?;
        labels.push(s.target.clone());
        energies.push(s.e_target);
        amps.push(s.values[k] * Complex64::new(0.0, -s.e_target * t).exp());
    }
    let n = crate::ket::norm(&amps);
    for a in &mut amps {
        *a /= n;
    }
    Ok(AssembledState { state: PureState { basis: Basis::Labels(labels), amplitudes: amps }, energies, normalization: n })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    pub basis: Basis,
    pub entries: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.entries.diagonal().iter().map(|z| z.re).sum()
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Largest `|ρ_mn − conj(ρ_nm)|`.
    pub fn hermiticity_error(&self) -> f64 {
        let n = self.dim();
        let mut e: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                e = e.max((self.entries[(i, j)] - self.entries[(j, i)].conj()).norm());
            }
        }
        e
    }

    /// Ascending eigenvalues of the Hermitian part.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let h = (&self.entries + self.entries.adjoint()) * Complex64::new(0.5, 0.0);
        let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// `−Σ λ ln λ` over eigenvalues above the floor.
    pub fn von_neumann_entropy(&self) -> f64 {
        let s: f64 = self.eigenvalues().into_iter().filter(|&l| l > ENTROPY_EIGEN_FLOOR).map(|l| -l * l.ln()).sum();
        s.max(0.0)
    }
}

/// `ρ_mn = ψ_m·conj(ψ_n)`.
pub fn density_matrix(state: &PureState) -> Result<DensityMatrix> {
    let n = state.norm();
    if (n - 1.0).abs() > UNIT_TOL {
        return Err(Error::NotNormalized { norm: n });
    }
    if state.amplitudes.len() != state.basis.dim() {
        return Err(Error::Dimension { expected: state.basis.dim(), got: state.amplitudes.len() });
    }
    let a = &state.amplitudes;
    let entries = DMatrix::from_fn(a.len(), a.len(), |i, j| a[i] * a[j].conj());
    Ok(DensityMatrix { basis: state.basis.clone(), entries })
}

/// Reduced density matrix on `keep` (ascending site order; kept site `keep[k]`
/// maps to bit `k`), tracing out every other site.
pub fn partial_trace(ket: &Ket, keep: &[usize]) -> Result<DensityMatrix> {
    let n = ket.n_sites();
    let mut kept_mask = 0usize;
    for &s in keep {
        if s >= n {
            return Err(Error::SiteOutOfRange { site: s, n_sites: n });
        }
        kept_mask |= 1 << s;
    }
    let env: Vec<usize> = (0..n).filter(|s| kept_mask & (1 << s) == 0).collect();
    let (dk, de) = (1usize << keep.len(), 1usize << env.len());
    let mut m = DMatrix::<Complex64>::zeros(dk, de);
    for (b, &amp) in ket.amplitudes().iter().enumerate() {
        let k = keep.iter().enumerate().fold(0, |acc, (i, &s)| acc | (((b >> s) & 1) << i));
        let e = env.iter().enumerate().fold(0, |acc, (i, &s)| acc | (((b >> s) & 1) << i));
        m[(k, e)] = amp;
    }
    let entries = &m * m.adjoint();
    Ok(DensityMatrix { basis: Basis::Hilbert { n_sites: keep.len() }, entries })
}

/// Partial trace onto `part`'s sites and its von Neumann entropy.
pub fn reduced_entropy(geom: &LatticeGeometry, ket: &Ket, part: Sublattice, cap: HilbertCap) -> Result<(DensityMatrix, f64)> {
    cap.check(geom.n_sites())?;
    ket.require_dim(geom.n_sites())?;
    ket.require_unit(UNIT_TOL)?;
    let keep = geom.sites_in(part);
    let rho = partial_trace(ket, &keep)?;
    let s = rho.von_neumann_entropy();
    Ok((rho, s))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    pub basis: Basis,
    pub matrix: DMatrix<Complex64>,
}

/// `Tr(ρ·op)`.
pub fn observable_expectation(rho: &DensityMatrix, op: &Operator) -> Result<Complex64> {
    if rho.basis != op.basis || op.matrix.nrows() != rho.dim() || op.matrix.ncols() != rho.dim() {
        return Err(Error::BasisMismatch);
    }
    let n = rho.dim();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += rho.entries[(i, j)] * op.matrix[(j, i)];
        }
    }
    Ok(acc)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Temperature {
    /// `kT > 0`.
    Finite(f64),
    /// `kT → 0`: uniform over the minimal-energy members.
    Zero,
    /// `kT → ∞`: uniform.
    Infinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum WeightFunction {
    #[default]
    Boltzmann,
    /// `p ∝ 1/(e^{(E−μ)/kT} + 1)`.
    Fermi { mu: f64 },
}

fn degenerate_tol(e_min: f64) -> f64 {
    1e-12 * e_min.abs().max(1.0)
}

pub fn thermal_weights(energies: &[f64], temperature: Temperature, weight: WeightFunction) -> Result<Vec<f64>> {
    if energies.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    if energies.iter().any(|e| !e.is_finite()) {
        return Err(Error::InvalidParameter("member energies must be finite".into()));
    }
    let n = energies.len();
    let raw: Vec<f64> = match (temperature, weight) {
        (Temperature::Finite(kt), _) if !(kt > 0.0 && kt.is_finite()) => {
            return Err(Error::InvalidParameter("kT must be positive and finite".into()));
        }
        (Temperature::Infinite, _) => vec![1.0; n],
        (Temperature::Zero, WeightFunction::Boltzmann) => {
            let e_min = energies.iter().copied().fold(f64::INFINITY, f64::min);
            let tol = degenerate_tol(e_min);
            energies.iter().map(|&e| if e - e_min <= tol { 1.0 } else { 0.0 }).collect()
        }
        (Temperature::Zero, WeightFunction::Fermi { mu }) => energies
            .iter()
            .map(|&e| if (e - mu).abs() <= degenerate_tol(mu) { 0.5 } else if e < mu { 1.0 } else { 0.0 })
            .collect(),
        (Temperature::Finite(kt), WeightFunction::Boltzmann) => {
            let e_min = energies.iter().copied().fold(f64::INFINITY, f64::min);
            energies.iter().map(|&e| (-(e - e_min) / kt).exp()).collect()
        }
        (Temperature::Finite(kt), WeightFunction::Fermi { mu }) => energies
            .iter()
            .map(|&e| {
                let x = (e - mu) / kt;
                // 1/(e^x + 1) without overflow for large x.
                if x > 0.0 {
                    let q = (-x).exp();
                    q / (1.0 + q)
                } else {
                    1.0 / (x.exp() + 1.0)
                }
            })
            .collect(),
    };
    let z: f64 = raw.iter().sum();
    if !(z > 0.0) {
        return Err(Error::InvalidParameter("no ensemble member carries weight".into()));
    }
    Ok(raw.into_iter().map(|w| w / z).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThermalEnsemble {
    pub energies: Vec<f64>,
    pub weights: Vec<f64>,
    pub rho: DensityMatrix,
}

/// `ρ = Σ_k p_k |ψ_k⟩⟨ψ_k|`. Members must share one basis; see
/// [`align_states`].
pub fn thermal_mix(members: &[(f64, PureState)], temperature: Temperature, weight: WeightFunction) -> Result<ThermalEnsemble> {
    let first = members.first().ok_or(Error::EmptyEnsemble)?;
    let energies: Vec<f64> = members.iter().map(|m| m.0).collect();
    let weights = thermal_weights(&energies, temperature, weight)?;
    let dim = first.1.basis.dim();
    let mut acc = DMatrix::<Complex64>::zeros(dim, dim);
    for ((_, state), &p) in members.iter().zip(&weights) {
        if state.basis != first.1.basis {
            return Err(Error::BasisMismatch);
        }
        let rho = density_matrix(state)?;
        acc += rho.entries * Complex64::new(p, 0.0);
    }
    Ok(ThermalEnsemble { energies, weights, rho: DensityMatrix { basis: first.1.basis.clone(), entries: acc } })
}

/// Embeds label-basis states into the sorted union of their bases.
pub fn align_states(states: &[PureState]) -> Result<Vec<PureState>> {
    let mut union = BTreeSet::new();
    for s in states {
        match &s.basis {
            Basis::Labels(l) => union.extend(l.iter().cloned()),
            Basis::Hilbert { .. } => return Err(Error::BasisMismatch),
        }
    }
    let labels: Vec<StateLabel> = union.into_iter().collect();
    states.iter().map(|s| s.embed(&labels)).collect()
}
