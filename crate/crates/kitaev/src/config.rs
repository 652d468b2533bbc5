//! Run configuration: a flat TOML file plus `key=value` overrides, where
//! overrides win.

use std::path::{Path, PathBuf};

use kitaev_core::density::{Temperature, WeightFunction};
use kitaev_core::hamiltonian::{CouplingParams, Engine};
use kitaev_core::ket::HilbertCap;
use kitaev_core::lattice::{build_lattice, LatticeGeometry, Sublattice};
use kitaev_core::manifold::FlipConfig;
use kitaev_core::perturbation::{check_time_grid, uniform_grid, DriveProfile, DriveSpec, EvolveOptions};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DriveKind {
    Exponential,
    Harmonic,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EngineKind {
    Label,
    Hilbert,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightKind {
    Boltzmann,
    Fermi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Part {
    A,
    B,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub nx: usize,
    pub ny: usize,
    pub jx: f64,
    pub jy: f64,
    pub jz: f64,
    pub drive: DriveKind,
    pub d: f64,
    pub omega: f64,
    /// CSV of `t,re,im` samples for the custom drive.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub drive_file: Option<PathBuf>,
    /// Initial flip configuration as a hex bitmask.
    pub initial: String,
    /// Driven and excited plaquette.
    pub plaquette: usize,
    pub t_max: f64,
    pub samples: usize,
    pub engine: EngineKind,
    pub hilbert_cap: usize,
    pub quadrature_tol: f64,
    pub oracle_tol: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps_zero: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slope_tol: Option<f64>,
    /// Evaluation time for single-time reports; defaults to `t_max`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub at: Option<f64>,
    /// Reference time of the correlation formula; defaults to the first grid
    /// point after 0.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t0: Option<f64>,
    pub omega_min: f64,
    pub omega_max: f64,
    pub omega_points: usize,
    /// `kT`; `0` selects the zero-temperature limit and `inf` the infinite one.
    pub kt: f64,
    pub weight: WeightKind,
    pub mu: f64,
    pub part: Part,
    pub selection_tol: f64,
    pub seed: u64,
    /// Where results go; not part of the canonical text, so moving a run
    /// keeps its hash.
    #[serde(skip_serializing)]
    pub output: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            nx: 2,
            ny: 2,
            jx: 1.0,
            jy: 1.0,
            jz: 1.0,
            drive: DriveKind::Exponential,
            d: 0.01,
            omega: 1.0,
            drive_file: None,
            initial: "0".into(),
            plaquette: 0,
            t_max: 10.0,
            samples: 201,
            engine: EngineKind::Label,
            hilbert_cap: kitaev_core::ket::DEFAULT_HILBERT_CAP,
            quadrature_tol: 1e-10,
            oracle_tol: kitaev_core::oracle::PRODUCTION_TOL,
            eps_zero: None,
            slope_tol: None,
            at: None,
            t0: None,
            omega_min: 0.0,
            omega_max: 4.0,
            omega_points: 81,
            kt: 1.0,
            weight: WeightKind::Boltzmann,
            mu: 0.0,
            part: Part::A,
            selection_tol: 1e-10,
            seed: 0,
            output: PathBuf::from("out"),
        }
    }
}

impl RunConfig {
    /// Reads `path` (if any), applies `overrides` in order, and validates.
    pub fn load(path: Option<&Path>, overrides: &[(String, String)]) -> Result<Self, CliError> {
        let mut table = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))?;
                text.parse::<toml::Table>().map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?
            }
            None => toml::Table::new(),
        };
        for (key, raw) in overrides {
            table.insert(key.clone(), parse_value(key, raw));
        }
        let cfg: RunConfig = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| CliError::Config(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Canonical serialization; the hash and every output header derive from it.
    pub fn canonical(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn hash(&self) -> String {
        Sha256::digest(self.canonical().as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        let geom = self.geometry()?;
        self.params().validate().map_err(|e| CliError::Config(e.to_string()))?;
        self.initial_config(&geom)?;
        self.drive_spec()?.validate(&geom).map_err(|e| CliError::Config(e.to_string()))?;
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return bad(format!("t_max must be positive, got {}", self.t_max));
        }
        if self.samples < 2 {
            return bad("samples must be at least 2".into());
        }
        for (name, v) in [("quadrature_tol", self.quadrature_tol), ("oracle_tol", self.oracle_tol), ("selection_tol", self.selection_tol)] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} must be positive, got {v}"));
            }
        }
        for (name, v) in [("eps_zero", self.eps_zero), ("slope_tol", self.slope_tol)] {
            if let Some(v) = v {
                if !(v > 0.0) {
                    return bad(format!("{name} must be positive, got {v}"));
                }
            }
        }
        for (name, v) in [("at", self.at), ("t0", self.t0)] {
            if let Some(t) = v {
                if !(0.0..=self.t_max).contains(&t) {
                    return bad(format!("{name} = {t} lies outside [0, t_max]"));
                }
            }
        }
        if self.hilbert_cap > 24 {
            return bad(format!("hilbert_cap {} exceeds 24 sites", self.hilbert_cap));
        }
        if !(self.omega_min <= self.omega_max) || self.omega_points == 0 {
            return bad("omega sweep needs omega_min <= omega_max and at least one point".into());
        }
        if self.kt.is_nan() || self.kt < 0.0 {
            return bad(format!("kt must be >= 0, got {}", self.kt));
        }
        Ok(())
    }

    pub fn geometry(&self) -> Result<LatticeGeometry, CliError> {
        build_lattice(self.nx, self.ny).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn params(&self) -> CouplingParams {
        CouplingParams { jx: self.jx, jy: self.jy, jz: self.jz, d: self.d, omega: self.omega }
    }

    pub fn initial_config(&self, geom: &LatticeGeometry) -> Result<FlipConfig, CliError> {
        FlipConfig::from_hex(geom.n_plaquettes(), &self.initial).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn cap(&self) -> HilbertCap {
        HilbertCap(self.hilbert_cap)
    }

    pub fn engine(&self) -> Engine {
        match self.engine {
            EngineKind::Label => Engine::Label,
            EngineKind::Hilbert => Engine::Hilbert(self.cap()),
        }
    }

    pub fn evolve_options(&self) -> EvolveOptions {
        EvolveOptions { engine: self.engine(), quadrature_tol: self.quadrature_tol }
    }

    pub fn oracle_options(&self) -> kitaev_core::oracle::OracleOptions {
        kitaev_core::oracle::OracleOptions { tol: self.oracle_tol, cap: self.cap() }
    }

    pub fn drive_spec(&self) -> Result<DriveSpec, CliError> {
        Ok(DriveSpec { plaquette: self.plaquette, profile: self.profile_at(self.omega)? })
    }

    /// Drive profile with the frequency replaced by `omega`.
    pub fn profile_at(&self, omega: f64) -> Result<DriveProfile, CliError> {
        Ok(match self.drive {
            DriveKind::Exponential => DriveProfile::Exponential { d: self.d, omega },
            DriveKind::Harmonic => DriveProfile::Harmonic { d: self.d, omega },
            DriveKind::Custom => {
                let path = self
                    .drive_file
                    .as_ref()
                    .ok_or_else(|| CliError::Config("drive = \"custom\" needs drive_file".into()))?;
                read_drive_samples(path)?
            }
        })
    }

    pub fn times(&self) -> Result<Vec<f64>, CliError> {
        let times = uniform_grid(self.t_max, self.samples);
        check_time_grid(&times).map_err(|e| CliError::Config(e.to_string()))?;
        Ok(times)
    }

    /// Grid time closest to `at` (or `t_max`).
    pub fn eval_time(&self, times: &[f64]) -> f64 {
        self.eval_time_near(times, self.at.unwrap_or(self.t_max))
    }

    /// Grid time closest to `want`.
    pub fn eval_time_near(&self, times: &[f64], want: f64) -> f64 {
        times.iter().copied().min_by(|a, b| (a - want).abs().total_cmp(&(b - want).abs())).unwrap_or(want)
    }

    pub fn temperature(&self) -> Temperature {
        if self.kt == 0.0 {
            Temperature::Zero
        } else if self.kt.is_infinite() {
            Temperature::Infinite
        } else {
            Temperature::Finite(self.kt)
        }
    }

    pub fn weight_function(&self) -> WeightFunction {
        match self.weight {
            WeightKind::Boltzmann => WeightFunction::Boltzmann,
            WeightKind::Fermi => WeightFunction::Fermi { mu: self.mu },
        }
    }

    pub fn sublattice(&self) -> Sublattice {
        match self.part {
            Part::A => Sublattice::A,
            Part::B => Sublattice::B,
        }
    }
}

/// Keys whose values are always strings, so `0x3` stays a bitmask.
const STRING_KEYS: [&str; 7] = ["drive", "drive_file", "initial", "engine", "weight", "part", "output"];

/// A TOML literal when it parses as one, otherwise a bare string. String
/// keys only accept a literal when it is itself a string.
fn parse_value(key: &str, raw: &str) -> toml::Value {
    let literal = format!("v = {raw}").parse::<toml::Table>().ok().and_then(|mut t| t.remove("v"));
    match literal {
        Some(v) if v.is_str() || !STRING_KEYS.contains(&key) => v,
        _ => toml::Value::String(raw.to_string()),
    }
}

#[derive(Debug, Deserialize)]
struct DriveSample {
    t: f64,
    re: f64,
    im: f64,
}

/// Custom drive samples: a CSV with header `t,re,im`; `#` lines are comments.
pub fn read_drive_samples(path: &Path) -> Result<DriveProfile, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let mut times = Vec::new();
    let mut values = Vec::new();
    for row in reader.deserialize::<DriveSample>() {
        let row = row.map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        times.push(row.t);
        values.push(Complex64::new(row.re, row.im));
    }
    Ok(DriveProfile::Sampled { times, values })
}
