//! One function per subcommand. Each writes its files under the configured
//! output directory and returns a short report for stdout.

use std::path::PathBuf;

use kitaev_core::lattice::LatticeGeometry;
use kitaev_core::manifold::{excite, ExcitedLabel, FlipConfig};
use kitaev_core::perturbation::{connected_targets, evolve_coefficients, Evolution};

use crate::config::RunConfig;
use crate::error::CliError;

pub mod correlate;
pub mod entropy;
pub mod evolve;
pub mod lattice;
pub mod manifold;
pub mod sweep;
pub mod thermal;
pub mod validate;

pub struct Context {
    pub cfg: RunConfig,
    pub emit_plot_script: bool,
    pub jobs: usize,
}

impl Context {
    pub fn out_dir(&self) -> Result<PathBuf, CliError> {
        crate::output::ensure_dir(&self.cfg.output)?;
        Ok(self.cfg.output.clone())
    }
}

/// What a command wrote and what it reports.
#[derive(Debug, Default)]
pub struct Outcome {
    pub lines: Vec<String>,
    pub files: Vec<PathBuf>,
    /// Names of failed checks; non-empty makes the run exit with status 1.
    pub failed: Vec<String>,
}

impl Outcome {
    pub fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }
}

/// First-order targets of the drive plus the excitation of the driven
/// plaquette itself, sorted and deduplicated.
pub fn active_targets(cfg: &RunConfig, geom: &LatticeGeometry, initial: &FlipConfig) -> Result<Vec<ExcitedLabel>, CliError> {
    let mut targets = connected_targets(geom, initial, cfg.plaquette, cfg.engine())?;
    targets.push(excite(initial, cfg.plaquette)?);
    targets.sort();
    targets.dedup();
    Ok(targets)
}

pub fn run_evolution(cfg: &RunConfig, geom: &LatticeGeometry) -> Result<Evolution, CliError> {
    let initial = cfg.initial_config(geom)?;
    let targets = active_targets(cfg, geom, &initial)?;
    let drive = cfg.drive_spec()?;
    Ok(evolve_coefficients(geom, &cfg.params(), &drive, &initial, &targets, &cfg.times()?, cfg.evolve_options())?)
}
