//! Frequency sweep of the final transition probability. Points are split into
//! contiguous shards, one worker and one shard file each, then merged in order.

use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use kitaev_core::lattice::LatticeGeometry;
use kitaev_core::manifold::{excite, ExcitedLabel, FlipConfig};
use kitaev_core::perturbation::{evolve_coefficients, DriveSpec};
use kitaev_core::phase::{decompose, effective_level, shifted_transition};
use serde::Serialize;

use super::{Context, Outcome};
use crate::config::{DriveKind, RunConfig};
use crate::error::CliError;
use crate::output::{fmt_f64, write_json, write_plot_script, CsvOut, Header};

#[derive(Debug, Serialize)]
pub struct SweepSummary {
    pub target: String,
    /// Unshifted resonance `E_target − E_initial`.
    pub omega0: f64,
    pub peak_omega: f64,
    pub peak_weight: f64,
    /// Effective-level transition at `t_eval` for the drive at `omega0`.
    pub predicted_peak: Option<f64>,
    pub t_eval: f64,
    pub points: usize,
}

pub fn omega_grid(cfg: &RunConfig) -> Vec<f64> {
    let n = cfg.omega_points;
    if n == 1 {
        return vec![cfg.omega_min];
    }
    let step = (cfg.omega_max - cfg.omega_min) / (n - 1) as f64;
    (0..n).map(|k| if k == n - 1 { cfg.omega_max } else { cfg.omega_min + step * k as f64 }).collect()
}

struct Problem<'a> {
    cfg: &'a RunConfig,
    geom: &'a LatticeGeometry,
    initial: FlipConfig,
    target: ExcitedLabel,
}

impl Problem<'_> {
    fn weight_at(&self, omega: f64) -> Result<f64, CliError> {
        let drive = DriveSpec { plaquette: self.cfg.plaquette, profile: self.cfg.profile_at(omega)? };
        let times = [0.0, self.cfg.t_max];
        let ev = evolve_coefficients(
            self.geom,
            &self.cfg.params(),
            &drive,
            &self.initial,
            core::slice::from_ref(&self.target),
            &times,
            self.cfg.evolve_options(),
        )?;
        Ok(ev.targets[0].values[1].norm_sqr())
    }
}

fn shard_path(dir: &Path, k: usize) -> PathBuf {
    dir.join(format!("sweep.shard-{k:03}.csv"))
}

fn write_shard(problem: &Problem<'_>, omegas: &[f64], path: &Path) -> Result<(), CliError> {
    let mut out = CsvOut::create(path, None, &[])?;
    for &w in omegas {
        out.row([fmt_f64(w), fmt_f64(problem.weight_at(w)?)])?;
    }
    out.finish()?;
    Ok(())
}

pub fn run(ctx: &Context) -> Result<Outcome, CliError> {
    let cfg = &ctx.cfg;
    if cfg.drive == DriveKind::Custom {
        return Err(CliError::Config("sweep needs an exponential or harmonic drive".into()));
    }
    let geom = cfg.geometry()?;
    let initial = cfg.initial_config(&geom)?;
    let target = excite(&initial, cfg.plaquette)?;
    let problem = Problem { cfg, geom: &geom, initial, target };
    let dir = ctx.out_dir()?;
    let omegas = omega_grid(cfg);
    let shards = ctx.jobs.clamp(1, omegas.len());
    let chunk = omegas.len().div_ceil(shards);
    let chunks: Vec<&[f64]> = omegas.chunks(chunk).collect();

    let results: Vec<Result<(), CliError>> = std::thread::scope(|s| {
        let handles: Vec<_> = chunks
            .iter()
            .enumerate()
            .map(|(k, part)| {
                let path = shard_path(&dir, k);
                let problem = &problem;
                s.spawn(move || write_shard(problem, part, &path))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("sweep worker panicked")).collect()
    });
    for r in results {
        r?;
    }

    let header = Header::new(cfg).with("target", kitaev_core::manifold::StateLabel::Excited(problem.target.clone()));
    let merged = dir.join("sweep.csv");
    let mut out = CsvOut::create(&merged, Some(&header), &["omega", "weight"])?;
    let mut best = (f64::NAN, f64::NEG_INFINITY);
    for k in 0..chunks.len() {
        let path = shard_path(&dir, k);
        let file = std::fs::File::open(&path).map_err(|e| CliError::io(&path, e))?;
        for line in BufReader::new(file).lines() {
            let line = line.map_err(|e| CliError::io(&path, e))?;
            let (w, p) = line.split_once(',').ok_or_else(|| CliError::io(&path, std::io::Error::other("bad shard row")))?;
            let weight: f64 = p.parse().map_err(|_| CliError::io(&path, std::io::Error::other("bad shard value")))?;
            let omega: f64 = w.parse().map_err(|_| CliError::io(&path, std::io::Error::other("bad shard value")))?;
            if weight > best.1 {
                best = (omega, weight);
            }
            out.row([w, p])?;
        }
        std::fs::remove_file(&path).map_err(|e| CliError::io(&path, e))?;
    }
    let mut outcome = Outcome::default();
    outcome.files.push(out.finish()?);

    let (omega0, predicted, t_eval) = predicted_peak(&problem)?;
    let summary = SweepSummary {
        target: header.extra[0].1.clone(),
        omega0,
        peak_omega: best.0,
        peak_weight: best.1,
        predicted_peak: predicted,
        t_eval,
        points: omegas.len(),
    };
    outcome.line(format!("{} points in {} shard(s)", omegas.len(), chunks.len()));
    outcome.line(format!("peak at omega = {} (|c|^2 = {:e}); unshifted resonance {omega0}", best.0, best.1));
    match predicted {
        Some(p) => outcome.line(format!("predicted shifted peak at t = {t_eval}: {p}")),
        None => outcome.line("predicted shifted peak undefined: the target is not driven at first order"),
    }
    outcome.files.push(write_json(&dir.join("sweep.json"), &header, &summary)?);
    if ctx.emit_plot_script {
        outcome.files.push(write_plot_script(&dir, "sweep.csv", "omega", &["weight"], None)?);
    }
    Ok(outcome)
}

/// `(ω0, E_eff,target(t) − E_eff,initial(t), t)` for the resonant drive.
fn predicted_peak(problem: &Problem<'_>) -> Result<(f64, Option<f64>, f64), CliError> {
    let cfg = problem.cfg;
    let times = cfg.times()?;
    let t_eval = cfg.eval_time(&times);
    let probe = DriveSpec { plaquette: cfg.plaquette, profile: cfg.profile_at(cfg.omega)? };
    let targets = core::slice::from_ref(&problem.target);
    let first = evolve_coefficients(problem.geom, &cfg.params(), &probe, &problem.initial, targets, &times[..2], cfg.evolve_options())?;
    let omega0 = first.targets[0].omega0();
    let resonant = DriveSpec { plaquette: cfg.plaquette, profile: cfg.profile_at(omega0)? };
    let ev = evolve_coefficients(problem.geom, &cfg.params(), &resonant, &problem.initial, targets, &times, cfg.evolve_options())?;
    let upper = effective_level(ev.targets[0].e_target, &decompose(&ev.targets[0], cfg.eps_zero)?);
    let lower = effective_level(ev.initial.e_target, &decompose(&ev.initial, cfg.eps_zero)?);
    let shift = shifted_transition(&upper, &lower)?.at(t_eval).ok().filter(|v| v.is_finite());
    Ok((omega0, shift, t_eval))
}
