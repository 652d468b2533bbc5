use kitaev_core::density::{align_states, assemble_state, thermal_mix, PureState};
use kitaev_core::manifold::FlipConfig;
use kitaev_core::perturbation::evolve_coefficients;
use serde::Serialize;

use super::entropy::DensityDump;
use super::{active_targets, Context, Outcome};
use crate::error::CliError;
use crate::output::{write_json, Header};

/// Largest plaquette count for which every configuration joins the ensemble.
pub const MEMBER_LIMIT: usize = 12;

#[derive(Debug, Serialize)]
pub struct Member {
    pub config: String,
    pub energy: f64,
    pub weight: f64,
}

#[derive(Debug, Serialize)]
pub struct ThermalDump {
    pub kt: f64,
    pub weight_function: String,
    pub members: Vec<Member>,
    pub entropy: f64,
    pub density: DensityDump,
}

/// Weighted mixture of the states evolved from every ground configuration,
/// each weighted by its initial energy.
pub fn run(ctx: &Context) -> Result<Outcome, CliError> {
    let cfg = &ctx.cfg;
    let geom = cfg.geometry()?;
    let n = geom.n_plaquettes();
    if n > MEMBER_LIMIT {
        return Err(CliError::Config(format!("thermal ensemble limited to {MEMBER_LIMIT} plaquettes, got {n}")));
    }
    let times = cfg.times()?;
    let t_eval = cfg.eval_time(&times);
    let drive = cfg.drive_spec()?;
    let mut energies = Vec::new();
    let mut states: Vec<PureState> = Vec::new();
    let mut configs = Vec::new();
    for bits in 0..(1u64 << n) {
        let c = FlipConfig::from_u64(n, bits)?;
        let targets = active_targets(cfg, &geom, &c)?;
        let ev = evolve_coefficients(&geom, &cfg.params(), &drive, &c, &targets, &times, cfg.evolve_options())?;
        energies.push(ev.initial.e_target);
        states.push(assemble_state(&ev, t_eval)?.state);
        configs.push(c.to_hex());
    }
    let aligned = align_states(&states)?;
    let members: Vec<(f64, PureState)> = energies.iter().copied().zip(aligned).collect();
    let ens = thermal_mix(&members, cfg.temperature(), cfg.weight_function())?;
    let entropy = ens.rho.von_neumann_entropy();
    let dump = ThermalDump {
        kt: cfg.kt,
        weight_function: format!("{:?}", cfg.weight).to_lowercase(),
        members: configs
            .into_iter()
            .zip(ens.energies.iter().zip(&ens.weights))
            .map(|(config, (&energy, &weight))| Member { config, energy, weight })
            .collect(),
        entropy,
        density: DensityDump::new(t_eval, &ens.rho),
    };
    let dir = ctx.out_dir()?;
    let mut outcome = Outcome::default();
    outcome.files.push(write_json(&dir.join("thermal.json"), &Header::new(cfg), &dump)?);
    outcome.line(format!("{} members at kT = {}, t = {t_eval}", dump.members.len(), cfg.kt));
    outcome.line(format!("trace {}, purity {}, entropy {entropy}", ens.rho.trace(), ens.rho.purity()));
    Ok(outcome)
}
