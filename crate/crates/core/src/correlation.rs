//! Spin correlation `σ_ij^{αβ}(t) = ⟨ψ(t)|σ_i^α(t)·σ_j^β(0)|ψ(t)⟩`, from the
//! coefficient-product formula and from exact Heisenberg-picture evolution.

use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::hamiltonian::CouplingParams;
use crate::ket::Ket;
use crate::lattice::LatticeGeometry;
use crate::manifold::{label_ket, FlipConfig, StateLabel};
use crate::oracle::{exact_evolve, propagate, OracleOptions};
use crate::pauli::{Component, PauliString};
use crate::perturbation::{CoefficientSeries, DriveSpec};
use crate::phase::SubGeometricPhaseSeries;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CorrelationEngine {
    Formula,
    Exact,
}

impl CorrelationEngine {
    pub fn as_str(self) -> &'static str {
        match self {
            CorrelationEngine::Formula => "formula",
            CorrelationEngine::Exact => "exact",
        }
    }
}

impl fmt::Display for CorrelationEngine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationRecord {
    pub site_i: usize,
    pub site_j: usize,
    pub alpha: Component,
    pub beta: Component,
    pub t: f64,
    pub t0: f64,
    pub value: Complex64,
    pub engine: CorrelationEngine,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FormulaResult {
    pub value: Complex64,
    /// Per-state terms `A(t)A(t0)·e^{−i(φ(t) − φ(t0) − E t)}`.
    pub terms: Vec<Complex64>,
    /// States with `A = 0` at `t` or `t0`; their terms are zero.
    pub singular_terms: usize,
    /// Every term vanished, e.g. first-order coefficients at `t0 = 0`.
    pub degenerate: bool,
}

/// `Σ_m A_m(t)·A_m(t0)·exp(−i(φ_m(t) − φ_m(t0) − E_m·t))` (`ħ = 1`).
pub fn correlation_formula(
    series: &[&CoefficientSeries],
    phases: &[SubGeometricPhaseSeries],
    t: f64,
    t0: f64,
) -> Result<FormulaResult> {
    if series.len() != phases.len() {
        return Err(Error::Dimension { expected: series.len(), got: phases.len() });
    }
    let mut terms = Vec::with_capacity(series.len());
    let mut singular_terms = 0;
    for (s, ph) in series.iter().zip(phases) {
        if s.times != ph.times {
            return Err(Error::BadTimeGrid);
        }
        let (k, k0) = (s.index_of(t)?, s.index_of(t0)?);
        if ph.singular[k] || ph.singular[k0] {
            singular_terms += 1;
            terms.push(Complex64::new(0.0, 0.0));
            continue;
        }
        let arg = -(ph.phase[k] - ph.phase[k0] - s.e_target * t);
        terms.push(Complex64::from_polar(ph.modulus[k] * ph.modulus[k0], arg));
    }
    let value = terms.iter().sum();
    let degenerate = !terms.is_empty() && singular_terms == terms.len();
    Ok(FormulaResult { value, terms, singular_terms, degenerate })
}

/// Bonded pairs `(i, j)` in bond order.
pub fn nearest_neighbor_pairs(geom: &LatticeGeometry) -> Vec<(usize, usize)> {
    geom.bonds().iter().map(|b| (b.i, b.j)).collect()
}

/// All nine `(α, β)` combinations.
pub fn all_component_pairs() -> Vec<(Component, Component)> {
    Component::ALL.iter().flat_map(|&a| Component::ALL.iter().map(move |&b| (a, b))).collect()
}

/// Outcome of testing "only bonded pairs with α = β correlate".
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionRuleDiagnostic {
    pub tol: f64,
    /// Records the rule predicts to vanish.
    pub checked: usize,
    /// Indices into the record table with `|value| > tol` among those.
    pub violations: Vec<usize>,
    pub max_violation: f64,
}

impl SelectionRuleDiagnostic {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactScan {
    pub records: Vec<CorrelationRecord>,
    pub selection_rule: SelectionRuleDiagnostic,
}

pub fn selection_rule_diagnostic(geom: &LatticeGeometry, records: &[CorrelationRecord], tol: f64) -> SelectionRuleDiagnostic {
    let mut checked = 0;
    let mut violations = Vec::new();
    let mut max_violation: f64 = 0.0;
    for (k, r) in records.iter().enumerate() {
        let allowed = r.alpha == r.beta && geom.are_bonded(r.site_i, r.site_j).is_some();
        if allowed {
            continue;
        }
        checked += 1;
        let m = r.value.norm();
        max_violation = max_violation.max(m);
        if m > tol {
            violations.push(k);
        }
    }
    SelectionRuleDiagnostic { tol, checked, violations, max_violation }
}

/// Exact correlation table at time `t` for the initial manifold configuration,
/// with `U(t)` the propagator of `H0 + B(t)·S` from 0.
#[allow(clippy::too_many_arguments)]
pub fn correlation_exact_scan(
    geom: &LatticeGeometry,
    params: &CouplingParams,
    drive: &DriveSpec,
    initial: &FlipConfig,
    pairs: &[(usize, usize)],
    components: &[(Component, Component)],
    t: f64,
    tol: f64,
    opts: OracleOptions,
) -> Result<ExactScan> {
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter("correlation time must be >= 0".into()));
    }
    for &(i, j) in pairs {
        geom.check_site(i)?;
        geom.check_site(j)?;
    }
    let psi0 = label_ket(geom, &StateLabel::Ground(initial.clone()), opts.cap)?;
    let evolve = |x: &Ket| -> Result<Ket> {
        if t == 0.0 {
            return Ok(x.clone());
        }
        let r = propagate(geom, params, drive, x, &[0.0, t], opts)?;
        Ok(r.kets[1].clone())
    };
    let psi_t = if t == 0.0 {
        psi0.clone()
    } else {
        exact_evolve(geom, params, drive, &psi0, &[0.0, t], opts)?.kets[1].clone()
    };
    let bra = evolve(&psi_t)?;

    // U(t)·σ_j^β|ψ(t)⟩ is shared by every record with the same (j, β).
    let mut cache: Vec<((usize, Component), Ket)> = Vec::new();
    let mut records = Vec::with_capacity(pairs.len() * components.len());
    for &(i, j) in pairs {
        for &(alpha, beta) in components {
            let key = (j, beta);
            let evolved = match cache.iter().find(|(k, _)| *k == key) {
                Some((_, v)) => v.clone(),
                None => {
                    let kicked = apply_site(&psi_t, j, beta);
                    let v = evolve(&kicked)?;
                    cache.push((key, v.clone()));
                    v
                }
            };
            let value = bra.inner(&apply_site(&evolved, i, alpha));
            records.push(CorrelationRecord { site_i: i, site_j: j, alpha, beta, t, t0: 0.0, value, engine: CorrelationEngine::Exact });
        }
    }
    let selection_rule = selection_rule_diagnostic(geom, &records, tol);
    Ok(ExactScan { records, selection_rule })
}

/// `⟨ψ|σ_i^α σ_j^β|ψ⟩`.
pub fn static_expectation(psi: &Ket, i: usize, alpha: Component, j: usize, beta: Component) -> Complex64 {
    psi.inner(&apply_site(&apply_site(psi, j, beta), i, alpha))
}

fn apply_site(psi: &Ket, site: usize, c: Component) -> Ket {
    let amps = PauliString::new(&[(site, c)]).apply(psi.amplitudes());
    Ket::from_amplitudes(psi.n_sites(), amps).expect("Pauli action preserves dimension")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::build_lattice;
    use crate::perturbation::{coefficient_closed_form, uniform_grid};
    use crate::phase::decompose;

    fn series(e: f64, delta: f64) -> CoefficientSeries {
        let times = uniform_grid(4.0, 41);
        let values = times.iter().map(|&t| coefficient_closed_form(Complex64::new(1.0, 0.0), 0.1, delta, t)).collect();
        CoefficientSeries { target: StateLabel::Ground(FlipConfig::empty(1)), e_target: e, e_initial: 0.0, element: Complex64::new(0.1, 0.0), times, values }
    }

    #[test]
    fn formula_reduces_to_coefficient_product() {
        let s = [series(0.7, 1.3), series(-0.2, 0.4)];
        let refs: Vec<&CoefficientSeries> = s.iter().collect();
        let ph: Vec<_> = s.iter().map(|x| decompose(x, None).unwrap()).collect();
        let (t, t0) = (2.0, 0.5);
        let r = correlation_formula(&refs, &ph, t, t0).unwrap();
        let want: Complex64 = s
            .iter()
            .map(|x| {
                let (k, k0) = (x.index_of(t).unwrap(), x.index_of(t0).unwrap());
                x.values[k].conj() * x.values[k0] * Complex64::new(0.0, x.e_target * t).exp()
            })
            .sum();
        assert!((r.value - want).norm() < 1e-15);
        assert!(!r.degenerate);
    }

    #[test]
    fn first_order_terms_vanish_at_zero_reference() {
        let s = series(0.7, 1.3);
        let ph = decompose(&s, None).unwrap();
        let r = correlation_formula(&[&s], &[ph], 2.0, 0.0).unwrap();
        assert_eq!(r.value, Complex64::new(0.0, 0.0));
        assert!(r.degenerate);
    }

    #[test]
    fn pauli_square_at_time_zero() {
        let g = build_lattice(2, 2).unwrap();
        let p = CouplingParams::isotropic(1.0);
        let scan = correlation_exact_scan(
            &g,
            &p,
            &DriveSpec::exponential(0, 0.0, 0.0),
            &FlipConfig::empty(4),
            &[(3, 3)],
            &all_component_pairs(),
            0.0,
            1e-10,
            OracleOptions::default(),
        )
        .unwrap();
        for r in scan.records.iter().filter(|r| r.alpha == r.beta) {
            assert!((r.value - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        }
        assert_eq!(scan.records.len(), 9);
    }
}
