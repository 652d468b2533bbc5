use kitaev_core::hamiltonian::EnergyTable;
use kitaev_core::manifold::{binomial, enumerate_weight_class, signature_collisions};

use super::{Context, Outcome};
use crate::error::CliError;
use crate::output::{fmt_f64, CsvOut, Header};

/// Largest plaquette count whose configurations are listed to CSV.
pub const LIST_LIMIT: usize = 20;

/// Class sizes `C(N, k)` and their total, checked against `2^N`.
pub fn counting_report(n: usize) -> Result<Outcome, CliError> {
    if n > 127 {
        return Err(CliError::Config(format!("n = {n} exceeds 127 plaquettes")));
    }
    let sizes: Vec<u128> = (0..=n).map(|k| binomial(n, k)).collect();
    let total: u128 = sizes.iter().sum();
    let mut outcome = Outcome::default();
    outcome.line(format!("N = {n}"));
    outcome.line(format!("class sizes: {}", sizes.iter().map(u128::to_string).collect::<Vec<_>>().join(", ")));
    outcome.line(format!("total: {total}"));
    let ok = total == 1u128 << n;
    outcome.line(format!("{} total equals 2^{n}", if ok { "PASS" } else { "FAIL" }));
    if !ok {
        outcome.failed.push("total equals 2^N".into());
    }
    Ok(outcome)
}

/// Enumerates every configuration of the configured lattice and its energy
/// table.
pub fn run(ctx: &Context) -> Result<Outcome, CliError> {
    let cfg = &ctx.cfg;
    let geom = cfg.geometry()?;
    let n = geom.n_plaquettes();
    if n > LIST_LIMIT {
        return Err(CliError::Config(format!("listing {n} plaquettes exceeds the limit of {LIST_LIMIT}; use --n")));
    }
    let mut outcome = counting_report(n)?;
    let dir = ctx.out_dir()?;
    let header = Header::new(cfg);

    let mut configs = CsvOut::create(&dir.join("manifold.csv"), Some(&header), &["config", "weight"])?;
    for k in 0..=n {
        let mut count = 0u128;
        for c in enumerate_weight_class(n, k)? {
            configs.row([c.to_hex(), k.to_string()])?;
            count += 1;
        }
        if count != binomial(n, k) {
            outcome.failed.push(format!("class {k} size"));
        }
    }
    outcome.files.push(configs.finish()?);

    let table = EnergyTable::full_manifold(&geom, &cfg.params(), cfg.engine(), true)?;
    let mut energies = CsvOut::create(&dir.join("energies.csv"), Some(&header), &["config", "excited", "plaquette", "energy"])?;
    for (label, e) in table.iter() {
        let excited = u8::from(label.excitation().is_some());
        energies.row([label.config().to_hex(), excited.to_string(), label.plaquette_or_neg().to_string(), fmt_f64(e)])?;
    }
    outcome.files.push(energies.finish()?);

    if geom.n_sites() <= 2 * LIST_LIMIT {
        let collisions = signature_collisions(&geom)?;
        outcome.line(format!("diagnostic: {} configuration pair(s) share a site-sign signature", collisions.len()));
    }
    Ok(outcome)
}
