//! Honeycomb torus geometry.
//!
//! Unit cell `(x, y)` holds an A site (index `2·(x + nx·y)`) and a B site
//! (index `2·(x + nx·y) + 1`). The A site of cell `R` bonds to B(R) along z,
//! B(R − a1) along x and B(R − a2) along y. The plaquette anchored at `R`
//! visits
//!
//! ```text
//! A(R) -z- B(R) -x- A(R+a1) -y- B(R+a1-a2) -z- A(R+a1-a2) -x- B(R-a2) -y- A(R)
//! ```
//!
//! so each position's label (x, y, z, x, y, z) is the component of the bond
//! leaving the hexagon at that site.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::pauli::Component;
use crate::{Error, Result};

/// Component label of each plaquette position.
pub const POSITION_LABELS: [Component; 6] =
    [Component::X, Component::Y, Component::Z, Component::X, Component::Y, Component::Z];

/// Component of the bond joining position `k` and `k + 1` (cyclic).
pub const EDGE_COMPONENTS: [Component; 6] =
    [Component::Z, Component::X, Component::Y, Component::Z, Component::X, Component::Y];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sublattice {
    A,
    B,
}

impl Sublattice {
    pub fn flipped(self) -> Self {
        match self {
            Sublattice::A => Sublattice::B,
            Sublattice::B => Sublattice::A,
        }
    }
}

impl fmt::Display for Sublattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sublattice::A => "A",
            Sublattice::B => "B",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bond {
    pub i: usize,
    pub j: usize,
    pub component: Component,
}

impl Bond {
    fn joins(&self, a: usize, b: usize) -> bool {
        (self.i == a && self.j == b) || (self.i == b && self.j == a)
    }
}

/// Raw, unvalidated geometry data. Mirrors the JSON geometry dump.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometryParts {
    pub nx: usize,
    pub ny: usize,
    pub sublattices: Vec<Sublattice>,
    pub bonds: Vec<Bond>,
    pub plaquettes: Vec<[usize; 6]>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LatticeGeometry {
    nx: usize,
    ny: usize,
    sublattices: Vec<Sublattice>,
    bonds: Vec<Bond>,
    plaquettes: Vec<[usize; 6]>,
    /// site -> (plaquette, position), sorted by plaquette.
    incidence: Vec<Vec<(usize, usize)>>,
}

pub fn build_lattice(nx: usize, ny: usize) -> Result<LatticeGeometry> {
    if nx < 2 || ny < 2 {
        return Err(Error::LatticeTooSmall { nx, ny });
    }
    let cell = |x: isize, y: isize| -> usize {
        let xm = x.rem_euclid(nx as isize) as usize;
        let ym = y.rem_euclid(ny as isize) as usize;
        xm + nx * ym
    };
    let a = |x: isize, y: isize| 2 * cell(x, y);
    let b = |x: isize, y: isize| 2 * cell(x, y) + 1;

    let n_cells = nx * ny;
    let mut sublattices = Vec::with_capacity(2 * n_cells);
    for _ in 0..n_cells {
        sublattices.push(Sublattice::A);
        sublattices.push(Sublattice::B);
    }

    let mut bonds = Vec::with_capacity(3 * n_cells);
    let mut plaquettes = Vec::with_capacity(n_cells);
    for y in 0..ny as isize {
        for x in 0..nx as isize {
            bonds.push(Bond { i: a(x, y), j: b(x, y), component: Component::Z });
            bonds.push(Bond { i: a(x, y), j: b(x - 1, y), component: Component::X });
            bonds.push(Bond { i: a(x, y), j: b(x, y - 1), component: Component::Y });
            plaquettes.push([
                a(x, y),
                b(x, y),
                a(x + 1, y),
                b(x + 1, y - 1),
                a(x + 1, y - 1),
                b(x, y - 1),
            ]);
        }
    }

    Ok(LatticeGeometry::from_parts(GeometryParts { nx, ny, sublattices, bonds, plaquettes }))
}

impl LatticeGeometry {
    /// Builds a geometry from raw parts without checking any invariant; run
    /// [`validate_geometry`] on the result.
    pub fn from_parts(parts: GeometryParts) -> Self {
        let n_sites = parts.sublattices.len();
        let mut incidence = alloc::vec![Vec::new(); n_sites];
        for (p, sites) in parts.plaquettes.iter().enumerate() {
            for (pos, &s) in sites.iter().enumerate() {
                if s < n_sites {
                    incidence[s].push((p, pos));
                }
            }
        }
        Self {
            nx: parts.nx,
            ny: parts.ny,
            sublattices: parts.sublattices,
            bonds: parts.bonds,
            plaquettes: parts.plaquettes,
            incidence,
        }
    }

    pub fn to_parts(&self) -> GeometryParts {
        GeometryParts {
            nx: self.nx,
            ny: self.ny,
            sublattices: self.sublattices.clone(),
            bonds: self.bonds.clone(),
            plaquettes: self.plaquettes.clone(),
        }
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn n_sites(&self) -> usize {
        self.sublattices.len()
    }

    pub fn n_plaquettes(&self) -> usize {
        self.plaquettes.len()
    }

    pub fn sublattice(&self, site: usize) -> Sublattice {
        self.sublattices[site]
    }

    pub fn sites_in(&self, part: Sublattice) -> Vec<usize> {
        (0..self.n_sites()).filter(|&s| self.sublattices[s] == part).collect()
    }

    pub fn bonds(&self) -> &[Bond] {
        &self.bonds
    }

    pub fn plaquettes(&self) -> &[[usize; 6]] {
        &self.plaquettes
    }

    pub fn plaquette(&self, p: usize) -> Result<&[usize; 6]> {
        self.plaquettes
            .get(p)
            .ok_or(Error::PlaquetteOutOfRange { index: p, count: self.plaquettes.len() })
    }

    /// `(plaquette, position)` pairs containing `site`, ordered by plaquette.
    pub fn incident_plaquettes(&self, site: usize) -> &[(usize, usize)] {
        &self.incidence[site]
    }

    pub fn check_site(&self, site: usize) -> Result<()> {
        if site < self.n_sites() {
            Ok(())
        } else {
            Err(Error::SiteOutOfRange { site, n_sites: self.n_sites() })
        }
    }

    pub fn check_plaquette(&self, p: usize) -> Result<()> {
        self.plaquette(p).map(|_| ())
    }

    /// Lowest-indexed plaquette containing `site` and the site's position in it.
    pub fn owner(&self, site: usize) -> Result<(usize, usize)> {
        self.check_site(site)?;
        self.incidence[site]
            .first()
            .copied()
            .ok_or(Error::SiteOutOfRange { site, n_sites: self.n_sites() })
    }

    /// Component labels of all sites under the ownership rule.
    pub fn site_components(&self) -> Vec<Component> {
        (0..self.n_sites())
            .map(|s| site_component(self, s).expect("every site of a built lattice has an owner"))
            .collect()
    }

    pub fn are_bonded(&self, a: usize, b: usize) -> Option<Component> {
        self.bonds.iter().find(|bond| bond.joins(a, b)).map(|bond| bond.component)
    }
}

/// Pauli component carried by `site`: the position label it has in its owner
/// plaquette (the lowest-indexed plaquette containing it).
pub fn site_component(geom: &LatticeGeometry, site: usize) -> Result<Component> {
    let (_, pos) = geom.owner(site)?;
    Ok(POSITION_LABELS[pos])
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<CheckOutcome>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| c.name == name)
    }
}

pub const CHECK_COUNTS: &str = "site/bond/plaquette counts";
pub const CHECK_SITE_INCIDENCE: &str = "site belongs to 3 plaquettes";
pub const CHECK_BOND_INCIDENCE: &str = "bond belongs to 2 plaquettes";
pub const CHECK_ALTERNATION: &str = "sublattice alternation";

pub fn validate_geometry(geom: &LatticeGeometry) -> ValidationReport {
    use alloc::format;
    let cells = geom.nx * geom.ny;
    let n_sites = geom.n_sites();
    let mut checks = Vec::new();

    let per_comp = |c: Component| geom.bonds.iter().filter(|b| b.component == c).count();
    let counts_ok = n_sites == 2 * cells
        && geom.bonds.len() == 3 * cells
        && Component::ALL.iter().all(|&c| per_comp(c) == cells)
        && geom.plaquettes.len() == cells;
    checks.push(CheckOutcome {
        name: CHECK_COUNTS,
        passed: counts_ok,
        detail: format!(
            "sites {n_sites} (want {}), bonds {} (want {}; x/y/z = {}/{}/{}), plaquettes {} (want {cells})",
            2 * cells,
            geom.bonds.len(),
            3 * cells,
            per_comp(Component::X),
            per_comp(Component::Y),
            per_comp(Component::Z),
            geom.plaquettes.len(),
        ),
    });

    let in_range = geom.plaquettes.iter().all(|p| p.iter().all(|&s| s < n_sites));
    let bad_sites: Vec<usize> = (0..n_sites).filter(|&s| geom.incidence[s].len() != 3).collect();
    checks.push(CheckOutcome {
        name: CHECK_SITE_INCIDENCE,
        passed: in_range && bad_sites.is_empty(),
        detail: if !in_range {
            String::from("plaquette references an out-of-range site")
        } else {
            format!("{} sites with incidence != 3", bad_sites.len())
        },
    });

    // Each bond must be an edge of exactly two plaquettes, and every
    // plaquette edge must be a listed bond of the expected component.
    let mut bond_hits = alloc::vec![0usize; geom.bonds.len()];
    let mut missing_edges = 0usize;
    let mut wrong_component = 0usize;
    for sites in &geom.plaquettes {
        for k in 0..6 {
            let (a, b) = (sites[k], sites[(k + 1) % 6]);
            match geom.bonds.iter().position(|bond| bond.joins(a, b)) {
                Some(idx) => {
                    bond_hits[idx] += 1;
                    if geom.bonds[idx].component != EDGE_COMPONENTS[k] {
                        wrong_component += 1;
                    }
                }
                None => missing_edges += 1,
            }
        }
    }
    let bad_bonds = bond_hits.iter().filter(|&&h| h != 2).count();
    checks.push(CheckOutcome {
        name: CHECK_BOND_INCIDENCE,
        passed: bad_bonds == 0 && missing_edges == 0 && wrong_component == 0,
        detail: format!(
            "{bad_bonds} bonds not in exactly 2 plaquettes, {missing_edges} plaquette edges missing from the bond list, {wrong_component} edges with the wrong component"
        ),
    });

    let mut bad_plaquettes = 0usize;
    for sites in &geom.plaquettes {
        let ok = sites.iter().enumerate().all(|(k, &s)| {
            let want = if k % 2 == 0 { Sublattice::A } else { Sublattice::B };
            geom.sublattices.get(s) == Some(&want)
        });
        if !ok {
            bad_plaquettes += 1;
        }
    }
    checks.push(CheckOutcome {
        name: CHECK_ALTERNATION,
        passed: bad_plaquettes == 0,
        detail: format!("{bad_plaquettes} plaquettes break A/B alternation"),
    });

    ValidationReport { checks }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_match_cell_formula() {
        for (nx, ny) in [(2, 2), (3, 3), (2, 5), (4, 3)] {
            let g = build_lattice(nx, ny).unwrap();
            assert_eq!(g.n_sites(), 2 * nx * ny);
            assert_eq!(g.bonds().len(), 3 * nx * ny);
            assert_eq!(g.n_plaquettes(), nx * ny);
        }
    }

    #[test]
    fn rejects_degenerate_wrap() {
        assert_eq!(build_lattice(1, 3), Err(Error::LatticeTooSmall { nx: 1, ny: 3 }));
        assert!(build_lattice(3, 0).is_err());
    }

    #[test]
    fn built_geometries_validate() {
        for (nx, ny) in [(2, 2), (3, 3), (3, 2), (5, 4)] {
            let report = validate_geometry(&build_lattice(nx, ny).unwrap());
            assert!(report.all_passed(), "{nx}x{ny}: {report:?}");
        }
    }

    #[test]
    fn owner_position_three_is_z() {
        let g = build_lattice(3, 3).unwrap();
        let site = g.plaquettes()[0][2];
        assert_eq!(g.owner(site).unwrap(), (0, 2));
        assert_eq!(site_component(&g, site).unwrap(), Component::Z);
    }

    #[test]
    fn site_component_out_of_range() {
        let g = build_lattice(2, 2).unwrap();
        assert_eq!(site_component(&g, 8), Err(Error::SiteOutOfRange { site: 8, n_sites: 8 }));
    }
}
