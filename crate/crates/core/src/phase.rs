//! Modulus/argument decomposition `c(t) = A(t)·e^{iφ(t)} = e^{a(t) + iφ(t)}`,
//! stability intervals of `a(t)` and the phase-shifted effective level.

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use num_complex::Complex64;
// Float math for no_std builds; std provides the inherent methods when linked.
#[allow(unused_imports)]
use num_traits::Float;

use crate::perturbation::CoefficientSeries;
use crate::{Error, Result};

/// Relative zero threshold: samples with `A < DEFAULT_EPS_ZERO_REL · max A`
/// are singular.
pub const DEFAULT_EPS_ZERO_REL: f64 = 1e-12;

/// Relative slope threshold applied to `max |a|`.
pub const DEFAULT_SLOPE_TOL_REL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct SubGeometricPhaseSeries {
    pub times: Vec<f64>,
    /// `A = |c|`.
    pub modulus: Vec<f64>,
    /// `a = ln A`; `-inf` where `A = 0`.
    pub log_modulus: Vec<f64>,
    /// Unwrapped argument; NaN at singular samples.
    pub phase: Vec<f64>,
    pub singular: Vec<bool>,
}

impl SubGeometricPhaseSeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `A·e^{iφ}`, zero at singular samples.
    pub fn reconstruct(&self) -> Vec<Complex64> {
        (0..self.len())
            .map(|k| {
                if self.singular[k] {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::from_polar(self.modulus[k], self.phase[k])
                }
            })
            .collect()
    }

    pub fn non_singular_count(&self) -> usize {
        self.singular.iter().filter(|s| !**s).count()
    }
}

/// Minimal-jump continuation of `raw`. A sample following a singular one keeps
/// its raw value (branch reset); singular samples map to NaN.
pub fn unwrap_phases(raw: &[f64], singular: &[bool]) -> Vec<f64> {
    let mut out = Vec::with_capacity(raw.len());
    let mut prev: Option<f64> = None;
    for (&r, &s) in raw.iter().zip(singular) {
        if s {
            out.push(f64::NAN);
            prev = None;
            continue;
        }
        let v = match prev {
            None => r,
            Some(p) => r - 2.0 * PI * ((r - p) / (2.0 * PI)).round(),
        };
        out.push(v);
        prev = Some(v);
    }
    out
}

/// `eps_zero = None` uses `DEFAULT_EPS_ZERO_REL · max A`.
pub fn decompose_values(times: &[f64], values: &[Complex64], eps_zero: Option<f64>) -> Result<SubGeometricPhaseSeries> {
    if times.len() != values.len() {
        return Err(Error::Dimension { expected: times.len(), got: values.len() });
    }
    let modulus: Vec<f64> = values.iter().map(|c| c.norm()).collect();
    let eps = match eps_zero {
        Some(e) if e > 0.0 && e.is_finite() => e,
        Some(_) => return Err(Error::InvalidParameter("eps_zero must be positive".into())),
        None => DEFAULT_EPS_ZERO_REL * modulus.iter().copied().fold(0.0, f64::max),
    };
    // A = 0 is always singular, even when eps is zero for an all-zero series.
    let singular: Vec<bool> = modulus.iter().map(|&a| a == 0.0 || a < eps).collect();
    let raw: Vec<f64> = values.iter().map(|c| c.arg()).collect();
    let phase = unwrap_phases(&raw, &singular);
    let log_modulus = modulus.iter().map(|&a| if a > 0.0 { a.ln() } else { f64::NEG_INFINITY }).collect();
    Ok(SubGeometricPhaseSeries { times: times.to_vec(), modulus, log_modulus, phase, singular })
}

pub fn decompose(series: &CoefficientSeries, eps_zero: Option<f64>) -> Result<SubGeometricPhaseSeries> {
    decompose_values(&series.times, &series.values, eps_zero)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stability {
    /// `a(t)` increasing: the state loses stability.
    Growing,
    Decaying,
}

impl Stability {
    pub fn as_str(self) -> &'static str {
        match self {
            Stability::Growing => "GROWING",
            Stability::Decaying => "DECAYING",
        }
    }
}

impl fmt::Display for Stability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityInterval {
    pub t_start: f64,
    pub t_end: f64,
    pub kind: Stability,
}

/// Finite-difference slope of `a(t)` at each sample; `None` at singular
/// samples or where no non-singular neighbour exists.
pub fn log_modulus_slopes(phase: &SubGeometricPhaseSeries) -> Vec<Option<f64>> {
    let n = phase.len();
    let t = &phase.times;
    let a = &phase.log_modulus;
    let ok = |k: usize| !phase.singular[k];
    (0..n)
        .map(|k| {
            if !ok(k) {
                return None;
            }
            let left = k > 0 && ok(k - 1);
            let right = k + 1 < n && ok(k + 1);
            match (left, right) {
                (true, true) => Some((a[k + 1] - a[k - 1]) / (t[k + 1] - t[k - 1])),
                (true, false) => Some((a[k] - a[k - 1]) / (t[k] - t[k - 1])),
                (false, true) => Some((a[k + 1] - a[k]) / (t[k + 1] - t[k])),
                (false, false) => None,
            }
        })
        .collect()
}

/// Maximal runs of samples whose `a` slope exceeds `±slope_tol`.
/// `slope_tol = None` uses `DEFAULT_SLOPE_TOL_REL · max |a|`.
///
/// A run starts at the preceding singular sample, or halfway from the
/// preceding non-singular sample; ends are placed symmetrically.
pub fn stability_intervals(phase: &SubGeometricPhaseSeries, slope_tol: Option<f64>) -> Result<Vec<StabilityInterval>> {
    let found = phase.non_singular_count();
    if found < 3 {
        return Err(Error::TooFewSamples { needed: 3, found });
    }
    let tol = match slope_tol {
        Some(s) if s >= 0.0 => s,
        Some(_) => return Err(Error::InvalidParameter("slope_tol must be non-negative".into())),
        None => {
            let max_a = (0..phase.len())
                .filter(|&k| !phase.singular[k])
                .map(|k| phase.log_modulus[k].abs())
                .fold(0.0, f64::max);
            DEFAULT_SLOPE_TOL_REL * max_a
        }
    };
    let labels: Vec<Option<Stability>> = log_modulus_slopes(phase)
        .into_iter()
        .map(|s| match s {
            Some(s) if s > tol => Some(Stability::Growing),
            Some(s) if s < -tol => Some(Stability::Decaying),
            _ => None,
        })
        .collect();

    let t = &phase.times;
    let n = t.len();
    let boundary = |inner: usize, outer: usize| {
        if phase.singular[outer] {
            t[outer]
        } else {
            0.5 * (t[inner] + t[outer])
        }
    };
    let mut out = Vec::new();
    let mut k = 0;
    while k < n {
        let Some(kind) = labels[k] else {
            k += 1;
            continue;
        };
        let first = k;
        while k + 1 < n && labels[k + 1] == Some(kind) {
            k += 1;
        }
        let last = k;
        let t_start = if first == 0 { t[0] } else { boundary(first, first - 1) };
        let t_end = if last + 1 == n { t[last] } else { boundary(last, last + 1) };
        out.push(StabilityInterval { t_start, t_end, kind });
        k += 1;
    }
    Ok(out)
}

/// `E_eff(t) = E − φ(t)/t` (`ħ = 1`) on the `t > 0` samples.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveLevel {
    pub times: Vec<f64>,
    /// NaN at singular samples.
    pub values: Vec<f64>,
}

impl EffectiveLevel {
    pub fn at(&self, t: f64) -> Result<f64> {
        crate::perturbation::time_index(&self.times, t).map(|k| self.values[k])
    }
}

pub fn effective_level(e: f64, phase: &SubGeometricPhaseSeries) -> EffectiveLevel {
    let mut times = Vec::new();
    let mut values = Vec::new();
    for (k, &t) in phase.times.iter().enumerate() {
        if t > 0.0 {
            times.push(t);
            values.push(e - phase.phase[k] / t);
        }
    }
    EffectiveLevel { times, values }
}

/// Shifted transition frequency `E_eff,upper(t) − E_eff,lower(t)`.
pub fn shifted_transition(upper: &EffectiveLevel, lower: &EffectiveLevel) -> Result<EffectiveLevel> {
    if upper.times != lower.times {
        return Err(Error::InvalidParameter("effective levels are sampled on different grids".into()));
    }
    Ok(EffectiveLevel {
        times: upper.times.clone(),
        values: upper.values.iter().zip(&lower.values).map(|(u, l)| u - l).collect(),
    })
}
