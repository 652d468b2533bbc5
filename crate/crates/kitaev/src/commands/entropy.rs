use kitaev_core::density::{assemble_state, density_matrix, reduced_entropy, Basis, DensityMatrix};
use serde::Serialize;

use super::{run_evolution, Context, Outcome};
use crate::error::CliError;
use crate::output::{fmt_f64, write_json, write_plot_script, CsvOut, Header};

/// Density export: basis labels and row-major `[re, im]` entries.
#[derive(Debug, Serialize)]
pub struct DensityDump {
    pub t: f64,
    pub basis: Vec<String>,
    pub dim: usize,
    pub entries: Vec<[f64; 2]>,
    pub trace: f64,
    pub purity: f64,
}

impl DensityDump {
    pub fn new(t: f64, rho: &DensityMatrix) -> Self {
        let n = rho.dim();
        let basis = match &rho.basis {
            Basis::Labels(l) => l.iter().map(ToString::to_string).collect(),
            Basis::Hilbert { n_sites } => (0..1usize << n_sites).map(|b| format!("{b:0width$b}", width = *n_sites)).collect(),
        };
        let entries = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| [rho.entries[(i, j)].re, rho.entries[(i, j)].im]).collect();
        Self { t, basis, dim: n, entries, trace: rho.trace(), purity: rho.purity() }
    }
}

pub fn run(ctx: &Context) -> Result<Outcome, CliError> {
    let cfg = &ctx.cfg;
    let geom = cfg.geometry()?;
    cfg.cap().check(geom.n_sites())?;
    let ev = run_evolution(cfg, &geom)?;
    let dir = ctx.out_dir()?;
    let part = cfg.sublattice();
    let column = format!("S_{part}");
    let header = Header::new(cfg).with("initial", &ev.initial.target).with("part", part);
    let mut csv = CsvOut::create(&dir.join("entropy.csv"), Some(&header), &["t", &column])?;
    let mut s_max: f64 = 0.0;
    for &t in ev.times() {
        let state = assemble_state(&ev, t)?.state;
        let ket = state.to_ket(&geom, cfg.cap())?.normalized();
        let (_, s) = reduced_entropy(&geom, &ket, part, cfg.cap())?;
        s_max = s_max.max(s);
        csv.row([fmt_f64(t), fmt_f64(s)])?;
    }
    let mut outcome = Outcome::default();
    outcome.files.push(csv.finish()?);

    let t_eval = cfg.eval_time(ev.times());
    let rho = density_matrix(&assemble_state(&ev, t_eval)?.state)?;
    outcome.files.push(write_json(&dir.join("density.json"), &header, &DensityDump::new(t_eval, &rho))?);
    if ctx.emit_plot_script {
        outcome.files.push(write_plot_script(&dir, "entropy.csv", "t", &[&column], None)?);
    }
    outcome.line(format!("max {column} = {s_max:e} over {} samples", ev.times().len()));
    outcome.line(format!("density matrix at t = {t_eval}: dim {}, purity {}", rho.dim(), rho.purity()));
    Ok(outcome)
}
