//! Kitaev Hamiltonian, plaquette operators, state energies and drive matrix
//! elements.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::ket::{HilbertCap, Ket};
use crate::lattice::{site_component, LatticeGeometry, POSITION_LABELS};
use crate::manifold::{label_ket, label_signature, StateLabel};
use crate::pauli::{site_matrix_element, Component, PauliString};
use crate::{Error, Result};

/// Pauli components of the drive string on positions 1..6 of the driven
/// plaquette: the plaquette operator with position 3 switched to σ^x.
pub const DRIVE_COMPONENTS: [Component; 6] =
    [Component::X, Component::Y, Component::X, Component::X, Component::Y, Component::Z];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingParams {
    pub jx: f64,
    pub jy: f64,
    pub jz: f64,
    /// Drive amplitude D.
    pub d: f64,
    /// Drive frequency ω.
    pub omega: f64,
}

impl Default for CouplingParams {
    fn default() -> Self {
        Self { jx: 1.0, jy: 1.0, jz: 1.0, d: 0.01, omega: 0.0 }
    }
}

impl CouplingParams {
    pub fn isotropic(j: f64) -> Self {
        Self { jx: j, jy: j, jz: j, ..Self::default() }
    }

    pub fn coupling(&self, c: Component) -> f64 {
        match c {
            Component::X => self.jx,
            Component::Y => self.jy,
            Component::Z => self.jz,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.jx, self.jy, self.jz, self.d, self.omega];
        if !all.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParameter("coupling parameters must be finite".into()));
        }
        if self.d < 0.0 {
            return Err(Error::InvalidParameter("drive amplitude D must be non-negative".into()));
        }
        Ok(())
    }
}

/// Which engine evaluates energies and drive elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    /// Exact expectation values in the full site Hilbert space.
    Hilbert(HilbertCap),
    /// Closed-form evaluation on the (component, sign) site labels.
    Label,
}

impl Engine {
    pub fn name(&self) -> &'static str {
        match self {
            Engine::Hilbert(_) => "hilbert",
            Engine::Label => "label",
        }
    }
}

fn bond_strings(geom: &LatticeGeometry) -> Vec<(Component, PauliString)> {
    geom.bonds()
        .iter()
        .map(|b| (b.component, PauliString::new(&[(b.i, b.component), (b.j, b.component)])))
        .collect()
}

/// Precomputed bond terms of H0 for repeated application.
#[derive(Debug, Clone)]
pub struct KitaevHamiltonian {
    n_sites: usize,
    terms: Vec<(f64, PauliString)>,
}

impl KitaevHamiltonian {
    pub fn new(geom: &LatticeGeometry, params: &CouplingParams) -> Self {
        let terms = bond_strings(geom)
            .into_iter()
            .map(|(c, s)| (params.coupling(c), s))
            .filter(|(j, _)| *j != 0.0)
            .collect();
        Self { n_sites: geom.n_sites(), terms }
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    /// `out += coeff · H0 · input`.
    pub fn apply_add(&self, coeff: Complex64, input: &[Complex64], out: &mut [Complex64]) {
        for (j, s) in &self.terms {
            s.apply_add(coeff * *j, input, out);
        }
    }
}

pub fn apply_h0(geom: &LatticeGeometry, params: &CouplingParams, ket: &Ket) -> Result<Ket> {
    ket.require_dim(geom.n_sites())?;
    let h = KitaevHamiltonian::new(geom, params);
    let mut out = Ket::zeros(geom.n_sites());
    h.apply_add(Complex64::new(1.0, 0.0), ket.amplitudes(), out.amplitudes_mut());
    Ok(out)
}

/// `w_p = σ1^x σ2^y σ3^z σ4^x σ5^y σ6^z` on plaquette `p`.
pub fn plaquette_operator(geom: &LatticeGeometry, p: usize) -> Result<PauliString> {
    let sites = geom.plaquette(p)?;
    let factors: Vec<_> = sites.iter().zip(POSITION_LABELS).map(|(&s, c)| (s, c)).collect();
    Ok(PauliString::new(&factors))
}

/// Drive string `σ1^x σ2^y σ3^x σ4^x σ5^y σ6^z` on plaquette `p`.
pub fn drive_operator(geom: &LatticeGeometry, p: usize) -> Result<PauliString> {
    let sites = geom.plaquette(p)?;
    let factors: Vec<_> = sites.iter().zip(DRIVE_COMPONENTS).map(|(&s, c)| (s, c)).collect();
    Ok(PauliString::new(&factors))
}

pub fn plaquette_expectation(geom: &LatticeGeometry, p: usize, ket: &Ket) -> Result<f64> {
    ket.require_dim(geom.n_sites())?;
    ket.require_unit(1e-9)?;
    let w = plaquette_operator(geom, p)?;
    Ok(w.matrix_element(ket.amplitudes(), ket.amplitudes()).re)
}

/// `⟨label|H0|label⟩`.
pub fn energy(geom: &LatticeGeometry, params: &CouplingParams, label: &StateLabel, engine: Engine) -> Result<f64> {
    match engine {
        Engine::Hilbert(cap) => {
            let ket = label_ket(geom, label, cap)?;
            let h = apply_h0(geom, params, &ket)?;
            Ok(ket.inner(&h).re)
        }
        Engine::Label => {
            let signs = label_signature(geom, label)?;
            let comps = geom.site_components();
            Ok(geom
                .bonds()
                .iter()
                .filter(|b| comps[b.i] == b.component && comps[b.j] == b.component)
                .map(|b| params.coupling(b.component) * f64::from(signs.sign(b.i) * signs.sign(b.j)))
                .sum())
        }
    }
}

/// `⟨to| S_p |from⟩` for the drive string on plaquette `p`, without the drive
/// amplitude.
pub fn drive_string_element(
    geom: &LatticeGeometry,
    plaquette: usize,
    from: &StateLabel,
    to: &StateLabel,
    engine: Engine,
) -> Result<Complex64> {
    let sites = *geom.plaquette(plaquette)?;
    match engine {
        Engine::Hilbert(cap) => {
            let ket_from = label_ket(geom, from, cap)?;
            let ket_to = label_ket(geom, to, cap)?;
            let s = drive_operator(geom, plaquette)?;
            Ok(s.matrix_element(ket_to.amplitudes(), ket_from.amplitudes()))
        }
        Engine::Label => {
            let s_from = label_signature(geom, from)?;
            let s_to = label_signature(geom, to)?;
            let mut acc = Complex64::new(1.0, 0.0);
            for site in 0..geom.n_sites() {
                let comp = site_component(geom, site)?;
                let (a, b) = (s_to.sign(site), s_from.sign(site));
                match sites.iter().position(|&s| s == site) {
                    Some(pos) => acc *= site_matrix_element(comp, a, DRIVE_COMPONENTS[pos], b),
                    None if a != b => return Ok(Complex64::new(0.0, 0.0)),
                    None => {}
                }
            }
            Ok(acc)
        }
    }
}

/// Time-independent part `M` of the drive element, with the drive string on
/// the target's excited plaquette: the full element is `B(t)·M/D`.
pub fn perturbation_element(
    geom: &LatticeGeometry,
    ground: &crate::manifold::FlipConfig,
    target: &crate::manifold::ExcitedLabel,
    params: &CouplingParams,
    engine: Engine,
) -> Result<Complex64> {
    let from = StateLabel::Ground(ground.clone());
    let to = StateLabel::Excited(target.clone());
    Ok(drive_string_element(geom, target.flipped_plaquette, &from, &to, engine)? * params.d)
}

/// Energies keyed by state label.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EnergyTable {
    entries: BTreeMap<StateLabel, f64>,
}

impl EnergyTable {
    pub fn build<I>(geom: &LatticeGeometry, params: &CouplingParams, engine: Engine, labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = StateLabel>,
    {
        let mut entries = BTreeMap::new();
        for label in labels {
            let e = energy(geom, params, &label, engine)?;
            entries.insert(label, e);
        }
        Ok(Self { entries })
    }

    /// All `2^N` configurations, each with and without every single
    /// excitation when `with_excitations` is set.
    pub fn full_manifold(
        geom: &LatticeGeometry,
        params: &CouplingParams,
        engine: Engine,
        with_excitations: bool,
    ) -> Result<Self> {
        let n = geom.n_plaquettes();
        if n > 20 {
            return Err(Error::InvalidParameter(alloc::format!("full manifold table limited to 20 plaquettes, got {n}")));
        }
        let mut labels = Vec::new();
        for bits in 0..(1u64 << n) {
            let c = crate::manifold::FlipConfig::from_u64(n, bits)?;
            if with_excitations {
                for i in 0..n {
                    labels.push(StateLabel::Excited(crate::manifold::excite(&c, i)?));
                }
            }
            labels.push(StateLabel::Ground(c));
        }
        Self::build(geom, params, engine, labels)
    }

    pub fn get(&self, label: &StateLabel) -> Option<f64> {
        self.entries.get(label).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&StateLabel, f64)> {
        self.entries.iter().map(|(k, v)| (k, *v))
    }
}

/// Dense matrix of a linear map given by its action on basis vectors.
pub fn dense_from_action<F>(n_sites: usize, mut apply: F) -> DMatrix<Complex64>
where
    F: FnMut(&[Complex64], &mut [Complex64]),
{
    let dim = 1usize << n_sites;
    let mut m = DMatrix::zeros(dim, dim);
    let mut e = alloc::vec![Complex64::new(0.0, 0.0); dim];
    let mut col = alloc::vec![Complex64::new(0.0, 0.0); dim];
    for j in 0..dim {
        e[j] = Complex64::new(1.0, 0.0);
        col.iter_mut().for_each(|x| *x = Complex64::new(0.0, 0.0));
        apply(&e, &mut col);
        for (i, v) in col.iter().enumerate() {
            m[(i, j)] = *v;
        }
        e[j] = Complex64::new(0.0, 0.0);
    }
    m
}

pub fn dense_h0(geom: &LatticeGeometry, params: &CouplingParams, cap: HilbertCap) -> Result<DMatrix<Complex64>> {
    cap.check(geom.n_sites())?;
    let h = KitaevHamiltonian::new(geom, params);
    Ok(dense_from_action(geom.n_sites(), |x, y| h.apply_add(Complex64::new(1.0, 0.0), x, y)))
}

pub fn dense_pauli(n_sites: usize, s: &PauliString, cap: HilbertCap) -> Result<DMatrix<Complex64>> {
    cap.check(n_sites)?;
    Ok(dense_from_action(n_sites, |x, y| s.apply_add(Complex64::new(1.0, 0.0), x, y)))
}

/// Largest absolute entry of `[w_p, H0]`, built densely.
pub fn plaquette_commutator_norm(
    geom: &LatticeGeometry,
    params: &CouplingParams,
    p: usize,
    cap: HilbertCap,
) -> Result<f64> {
    let h = dense_h0(geom, params, cap)?;
    let w = dense_pauli(geom.n_sites(), &plaquette_operator(geom, p)?, cap)?;
    let c = &w * &h - &h * &w;
    Ok(c.iter().map(|z| z.norm()).fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_lattice, Bond, GeometryParts, Sublattice};
    use crate::manifold::{excite, FlipConfig};

    fn two_site_z() -> LatticeGeometry {
        LatticeGeometry::from_parts(GeometryParts {
            nx: 1,
            ny: 1,
            sublattices: alloc::vec![Sublattice::A, Sublattice::B],
            bonds: alloc::vec![Bond { i: 0, j: 1, component: Component::Z }],
            plaquettes: alloc::vec![],
        })
    }

    #[test]
    fn z_bond_on_up_up() {
        let g = two_site_z();
        let p = CouplingParams { jz: 0.7, ..CouplingParams::default() };
        let out = apply_h0(&g, &p, &Ket::basis(2, 0)).unwrap();
        assert!((out[0] - Complex64::new(0.7, 0.0)).norm() < 1e-15);
        assert!(out.amplitudes()[1..].iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn zero_couplings_give_zero() {
        let g = build_lattice(2, 2).unwrap();
        let p = CouplingParams::isotropic(0.0);
        let k = crate::manifold::build_product_ket(&g, &FlipConfig::empty(4), None, HilbertCap::default()).unwrap();
        let out = apply_h0(&g, &p, &k).unwrap();
        assert!(out.norm() == 0.0);
    }

    #[test]
    fn dimension_mismatch() {
        let g = build_lattice(2, 2).unwrap();
        let err = apply_h0(&g, &CouplingParams::default(), &Ket::zeros(3)).unwrap_err();
        assert_eq!(err, Error::Dimension { expected: 256, got: 8 });
    }

    #[test]
    fn expectation_rejects_unnormalized() {
        let g = build_lattice(2, 2).unwrap();
        let k = Ket::basis(8, 0).scaled(Complex64::new(2.0, 0.0));
        assert!(matches!(plaquette_expectation(&g, 0, &k), Err(Error::NotNormalized { .. })));
    }

    #[test]
    fn drive_off_gives_zero_element() {
        let g = build_lattice(2, 2).unwrap();
        let p = CouplingParams { d: 0.0, ..CouplingParams::default() };
        let c = FlipConfig::empty(4);
        let m = perturbation_element(&g, &c, &excite(&c, 0).unwrap(), &p, Engine::Label).unwrap();
        assert_eq!(m, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn params_validation() {
        assert!(CouplingParams { d: -1.0, ..CouplingParams::default() }.validate().is_err());
        assert!(CouplingParams { jx: f64::NAN, ..CouplingParams::default() }.validate().is_err());
        assert!(CouplingParams::default().validate().is_ok());
    }
}
