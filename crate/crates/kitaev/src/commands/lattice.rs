use kitaev_core::lattice::{validate_geometry, LatticeGeometry};
use serde::Serialize;

use super::{Context, Outcome};
use crate::error::CliError;
use crate::output::{write_json, Header};

#[derive(Debug, Serialize)]
pub struct SiteDump {
    pub id: usize,
    pub sublattice: String,
}

#[derive(Debug, Serialize)]
pub struct BondDump {
    pub i: usize,
    pub j: usize,
    pub component: String,
}

#[derive(Debug, Serialize)]
pub struct GeometryDump {
    pub nx: usize,
    pub ny: usize,
    pub sites: Vec<SiteDump>,
    pub bonds: Vec<BondDump>,
    pub plaquettes: Vec<[usize; 6]>,
}

impl GeometryDump {
    pub fn new(geom: &LatticeGeometry) -> Self {
        Self {
            nx: geom.nx(),
            ny: geom.ny(),
            sites: (0..geom.n_sites()).map(|id| SiteDump { id, sublattice: geom.sublattice(id).to_string() }).collect(),
            bonds: geom
                .bonds()
                .iter()
                .map(|b| BondDump { i: b.i, j: b.j, component: b.component.as_char().to_string() })
                .collect(),
            plaquettes: geom.plaquettes().to_vec(),
        }
    }
}

pub fn run(ctx: &Context) -> Result<Outcome, CliError> {
    let geom = ctx.cfg.geometry()?;
    let dir = ctx.out_dir()?;
    let mut outcome = Outcome::default();
    outcome.files.push(write_json(&dir.join("geometry.json"), &Header::new(&ctx.cfg), &GeometryDump::new(&geom))?);
    outcome.line(format!(
        "{}x{} torus: {} sites, {} bonds, {} plaquettes",
        geom.nx(),
        geom.ny(),
        geom.n_sites(),
        geom.bonds().len(),
        geom.n_plaquettes()
    ));
    let components: String = geom.site_components().iter().map(|c| c.as_char()).collect();
    outcome.line(format!("site components: {components}"));
    for check in validate_geometry(&geom).checks {
        outcome.line(format!("{} {}: {}", if check.passed { "PASS" } else { "FAIL" }, check.name, check.detail));
        if !check.passed {
            outcome.failed.push(check.name.to_string());
        }
    }
    Ok(outcome)
}
