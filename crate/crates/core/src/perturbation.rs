//! First-order time-dependent perturbation coefficients
//!
//! ```text
//! c(t) = (1/i) ∫_0^t e^{iΔE t'} ⟨target|H'(t')|initial⟩ dt'      (ħ = 1)
//! ```
//!
//! with `H'(t) = B(t)·S_i`, `S_i` the drive string on plaquette `i`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
// Float math for no_std builds; std provides the inherent methods when linked.
#[allow(unused_imports)]
use num_traits::Float;

use crate::hamiltonian::{drive_string_element, energy, CouplingParams, Engine};
use crate::lattice::LatticeGeometry;
use crate::manifold::{ExcitedLabel, FlipConfig, StateLabel};
use crate::quadrature::{integrate, QuadratureOptions};
use crate::{Error, Result};

/// `|δt|` below which the closed form switches to its Taylor expansion.
pub const RESONANCE_SERIES_THRESHOLD: f64 = 1e-4;

/// Time profile `B(t)` of the drive.
#[derive(Debug, Clone, PartialEq)]
pub enum DriveProfile {
    /// `B(t) = D·exp(−iωt)`.
    Exponential { d: f64, omega: f64 },
    /// `B(t) = D·cos(ωt)`, a Hermitian drive.
    Harmonic { d: f64, omega: f64 },
    /// Samples of `B(t)`, linearly interpolated and held constant outside the
    /// sampled range.
    Sampled { times: Vec<f64>, values: Vec<Complex64> },
}

impl DriveProfile {
    pub fn amplitude(&self, t: f64) -> Complex64 {
        match self {
            DriveProfile::Exponential { d, omega } => Complex64::new(0.0, -omega * t).exp() * *d,
            DriveProfile::Harmonic { d, omega } => Complex64::new(d * (omega * t).cos(), 0.0),
            DriveProfile::Sampled { times, values } => interpolate(times, values, t),
        }
    }

    /// Characteristic amplitude `D`.
    pub fn scale(&self) -> f64 {
        match self {
            DriveProfile::Exponential { d, .. } | DriveProfile::Harmonic { d, .. } => *d,
            DriveProfile::Sampled { values, .. } => values.iter().map(|v| v.norm()).fold(0.0, f64::max),
        }
    }

    /// Whether `B(t)` is real for every `t`, i.e. `H'(t)` is Hermitian.
    pub fn is_hermitian(&self) -> bool {
        match self {
            DriveProfile::Exponential { d, omega } => *d == 0.0 || *omega == 0.0,
            DriveProfile::Harmonic { .. } => true,
            DriveProfile::Sampled { values, .. } => values.iter().all(|v| v.im == 0.0),
        }
    }

    /// Same profile with the amplitude multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        match self {
            DriveProfile::Exponential { d, omega } => DriveProfile::Exponential { d: d * factor, omega: *omega },
            DriveProfile::Harmonic { d, omega } => DriveProfile::Harmonic { d: d * factor, omega: *omega },
            DriveProfile::Sampled { times, values } => DriveProfile::Sampled {
                times: times.clone(),
                values: values.iter().map(|v| v * factor).collect(),
            },
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            DriveProfile::Exponential { d, omega } | DriveProfile::Harmonic { d, omega } => {
                if !d.is_finite() || !omega.is_finite() || *d < 0.0 {
                    return Err(Error::InvalidParameter("drive needs finite D >= 0 and finite omega".into()));
                }
            }
            DriveProfile::Sampled { times, values } => {
                if times.is_empty() || times.len() != values.len() {
                    return Err(Error::InvalidParameter("sampled drive needs equal, non-empty time/value lists".into()));
                }
                if times.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(Error::InvalidParameter("sampled drive times must increase strictly".into()));
                }
            }
        }
        Ok(())
    }
}

fn interpolate(times: &[f64], values: &[Complex64], t: f64) -> Complex64 {
    if t <= times[0] {
        return values[0];
    }
    let last = times.len() - 1;
    if t >= times[last] {
        return values[last];
    }
    let k = times.partition_point(|&x| x <= t) - 1;
    let w = (t - times[k]) / (times[k + 1] - times[k]);
    values[k] * (1.0 - w) + values[k + 1] * w
}

#[derive(Debug, Clone, PartialEq)]
pub struct DriveSpec {
    /// Plaquette carrying the drive string.
    pub plaquette: usize,
    pub profile: DriveProfile,
}

impl DriveSpec {
    pub fn exponential(plaquette: usize, d: f64, omega: f64) -> Self {
        Self { plaquette, profile: DriveProfile::Exponential { d, omega } }
    }

    pub fn validate(&self, geom: &LatticeGeometry) -> Result<()> {
        geom.check_plaquette(self.plaquette)?;
        self.profile.validate()
    }
}

/// Unit-amplitude closed form `[(1 − cos δt) − i·sin δt]/δ`, with the Taylor
/// branch near resonance.
fn closed_form_unit(delta: f64, t: f64) -> Complex64 {
    let x = delta * t;
    if x.abs() < RESONANCE_SERIES_THRESHOLD {
        let x2 = x * x;
        // (1 − cos x)/x and sin(x)/x to O(x^6).
        let re = x * (0.5 - x2 / 24.0 + x2 * x2 / 720.0);
        let im = 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
        Complex64::new(t * re, -t * im)
    } else {
        let s = (0.5 * x).sin();
        Complex64::new(2.0 * s * s / delta, -x.sin() / delta)
    }
}

/// `c(t)` for `B(t) = D·e^{−iωt}`: `m_sign·(a + ib)` with
/// `a = (D/δ)(1 − cos δt)`, `b = −(D/δ) sin δt`, `δ = ω0 − ω`.
pub fn coefficient_closed_form(m_sign: Complex64, d: f64, delta: f64, t: f64) -> Complex64 {
    m_sign * d * closed_form_unit(delta, t)
}

/// `c(t)` by adaptive quadrature of `(1/i)∫ e^{iΔE t'} B(t') m_sign dt'`.
pub fn coefficient_quadrature(m_sign: Complex64, drive: &DriveProfile, delta_e: f64, t: f64, tol: f64) -> Result<Complex64> {
    if t < 0.0 || !t.is_finite() {
        return Err(Error::InvalidParameter("quadrature end time must be finite and >= 0".into()));
    }
    let freq = delta_e.abs()
        + match drive {
            DriveProfile::Exponential { omega, .. } | DriveProfile::Harmonic { omega, .. } => omega.abs(),
            DriveProfile::Sampled { .. } => 0.0,
        };
    let panels = ((t * freq / core::f64::consts::PI).ceil() as usize).clamp(1, 10_000);
    let breaks: &[f64] = match drive {
        DriveProfile::Sampled { times, .. } => times,
        _ => &[],
    };
    let minus_i = Complex64::new(0.0, -1.0);
    let r = integrate(
        |s| minus_i * Complex64::new(0.0, delta_e * s).exp() * drive.amplitude(s),
        0.0,
        t,
        breaks,
        panels,
        QuadratureOptions { tol, ..QuadratureOptions::default() },
    )?;
    Ok(m_sign * r.value)
}

/// Trajectory `c(t_k)` of one state's coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSeries {
    pub target: StateLabel,
    pub e_target: f64,
    pub e_initial: f64,
    /// Drive matrix element without the time profile (`D·⟨target|S|initial⟩`).
    pub element: Complex64,
    pub times: Vec<f64>,
    pub values: Vec<Complex64>,
}

impl CoefficientSeries {
    /// Transition frequency `ω0 = E_target − E_initial`.
    pub fn omega0(&self) -> f64 {
        self.e_target - self.e_initial
    }

    pub fn index_of(&self, t: f64) -> Result<usize> {
        time_index(&self.times, t)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.norm() == 0.0)
    }
}

pub(crate) fn time_index(times: &[f64], t: f64) -> Result<usize> {
    let scale = times.last().map_or(1.0, |x| x.abs().max(1.0));
    times
        .iter()
        .position(|&x| (x - t).abs() <= 1e-12 * scale)
        .ok_or(Error::TimeNotOnGrid { t })
}

pub fn check_time_grid(times: &[f64]) -> Result<()> {
    if times.first() != Some(&0.0) || times.windows(2).any(|w| !(w[1] > w[0])) || times.iter().any(|t| !t.is_finite()) {
        return Err(Error::BadTimeGrid);
    }
    Ok(())
}

pub fn uniform_grid(t_max: f64, samples: usize) -> Vec<f64> {
    let n = samples.max(2);
    (0..n).map(|k| t_max * k as f64 / (n - 1) as f64).collect()
}

/// Coefficients of the initial state and every target.
#[derive(Debug, Clone, PartialEq)]
pub struct Evolution {
    /// Initial configuration, coefficient fixed at 1 (zeroth order).
    pub initial: CoefficientSeries,
    pub targets: Vec<CoefficientSeries>,
}

impl Evolution {
    pub fn times(&self) -> &[f64] {
        &self.initial.times
    }

    /// Initial series first, then targets.
    pub fn all_series(&self) -> impl Iterator<Item = &CoefficientSeries> {
        core::iter::once(&self.initial).chain(self.targets.iter())
    }

    /// `Σ_targets |c(t_k)|²` at every sample.
    pub fn first_order_weight(&self) -> Vec<f64> {
        (0..self.times().len())
            .map(|k| self.targets.iter().map(|s| s.values[k].norm_sqr()).sum())
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    pub engine: Engine,
    /// Absolute quadrature tolerance for non-exponential drives.
    pub quadrature_tol: f64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self { engine: Engine::Label, quadrature_tol: 1e-10 }
    }
}

pub fn evolve_coefficients(
    geom: &LatticeGeometry,
    params: &CouplingParams,
    drive: &DriveSpec,
    initial: &FlipConfig,
    targets: &[ExcitedLabel],
    times: &[f64],
    opts: EvolveOptions,
) -> Result<Evolution> {
    params.validate()?;
    drive.validate(geom)?;
    check_time_grid(times)?;
    let initial_label = StateLabel::Ground(initial.clone());
    let e_initial = energy(geom, params, &initial_label, opts.engine)?;
    let initial_series = CoefficientSeries {
        target: initial_label.clone(),
        e_target: e_initial,
        e_initial,
        element: Complex64::new(0.0, 0.0),
        times: times.to_vec(),
        values: vec![Complex64::new(1.0, 0.0); times.len()],
    };

    let mut out = Vec::with_capacity(targets.len());
    for target in targets {
        let label = StateLabel::Excited(target.clone());
        let e_target = energy(geom, params, &label, opts.engine)?;
        let unit = drive_string_element(geom, drive.plaquette, &initial_label, &label, opts.engine)?;
        let zero = unit.norm() < 1e-14;
        let values = if zero {
            vec![Complex64::new(0.0, 0.0); times.len()]
        } else {
            match drive.profile {
                DriveProfile::Exponential { d, omega } => {
                    let delta = e_target - e_initial - omega;
                    times.iter().map(|&t| coefficient_closed_form(unit, d, delta, t)).collect()
                }
                _ => {
                    // Accumulate panel by panel so each sample reuses the
                    // previous integral.
                    let mut acc = Complex64::new(0.0, 0.0);
                    let mut vals = Vec::with_capacity(times.len());
                    vals.push(acc);
                    let per_panel_tol = opts.quadrature_tol / times.len() as f64;
                    for w in times.windows(2) {
                        acc += panel_integral(unit, &drive.profile, e_target - e_initial, w[0], w[1], per_panel_tol)?;
                        vals.push(acc);
                    }
                    vals
                }
            }
        };
        out.push(CoefficientSeries {
            target: label,
            e_target,
            e_initial,
            element: unit * drive.profile.scale(),
            times: times.to_vec(),
            values,
        });
    }
    Ok(Evolution { initial: initial_series, targets: out })
}

fn panel_integral(unit: Complex64, drive: &DriveProfile, delta_e: f64, a: f64, b: f64, tol: f64) -> Result<Complex64> {
    let minus_i = Complex64::new(0.0, -1.0);
    let breaks: Vec<f64> = match drive {
        DriveProfile::Sampled { times, .. } => times.iter().copied().filter(|&x| x > a && x < b).collect(),
        _ => Vec::new(),
    };
    let r = integrate(
        |s| minus_i * Complex64::new(0.0, delta_e * s).exp() * drive.amplitude(s),
        a,
        b,
        &breaks,
        1,
        QuadratureOptions { tol, ..QuadratureOptions::default() },
    )?;
    Ok(unit * r.value)
}

/// Excitations reachable from `initial` by the drive string on `plaquette`
/// at first order: single excitations of `initial` and of its one-plaquette
/// neighbours in the manifold, kept when the element is non-zero.
pub fn connected_targets(
    geom: &LatticeGeometry,
    initial: &FlipConfig,
    plaquette: usize,
    engine: Engine,
) -> Result<Vec<ExcitedLabel>> {
    let n = geom.n_plaquettes();
    let from = StateLabel::Ground(initial.clone());
    let mut candidates = Vec::new();
    for j in 0..n {
        candidates.push(crate::manifold::excite(initial, j)?);
    }
    for p in 0..n {
        candidates.push(crate::manifold::excite(&initial.toggled(p), plaquette)?);
    }
    candidates.sort();
    candidates.dedup();
    let mut out = Vec::new();
    for c in candidates {
        let el = drive_string_element(geom, plaquette, &from, &StateLabel::Excited(c.clone()), engine)?;
        if el.norm() > 1e-12 {
            out.push(c);
        }
    }
    Ok(out)
}
