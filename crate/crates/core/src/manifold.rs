//! Ground-manifold coordinates (plaquette flip configurations), excited-state
//! labels, and their realization as product kets.
//!
//! A configuration flips all six spins of every selected plaquette; a site
//! shared by several flipped plaquettes is flipped once per plaquette, so its
//! sign is the parity of its flipped incident plaquettes. Every site carries
//! the Pauli component given by [`site_component`].

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;
// Float math for no_std builds; std provides the inherent methods when linked.
#[allow(unused_imports)]
use num_traits::Float;

use crate::ket::{HilbertCap, Ket};
use crate::lattice::{site_component, LatticeGeometry};
use crate::pauli::Component;
use crate::{Error, Result};

/// Bit set over `N` plaquettes; bit `p` set means plaquette `p` is fully
/// flipped.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FlipConfig {
    len: usize,
    words: Vec<u64>,
    weight: usize,
}

impl FlipConfig {
    pub fn empty(len: usize) -> Self {
        Self { len, words: vec![0; len.div_ceil(64).max(1)], weight: 0 }
    }

    pub fn full(len: usize) -> Self {
        let mut c = Self::empty(len);
        for p in 0..len {
            c.set(p, true);
        }
        c
    }

    pub fn from_indices(len: usize, indices: &[usize]) -> Result<Self> {
        let mut c = Self::empty(len);
        for &p in indices {
            if p >= len {
                return Err(Error::PlaquetteOutOfRange { index: p, count: len });
            }
            c.set(p, true);
        }
        Ok(c)
    }

    pub fn from_u64(len: usize, bits: u64) -> Result<Self> {
        if len < 64 && bits >> len != 0 {
            return Err(Error::ParseConfig(alloc::format!("{bits:#x} has bits beyond {len} plaquettes")));
        }
        let mut c = Self::empty(len);
        c.words[0] = bits;
        c.weight = bits.count_ones() as usize;
        Ok(c)
    }

    /// Parses a hex bitmask such as `0x5` or `5`.
    pub fn from_hex(len: usize, hex: &str) -> Result<Self> {
        let digits = hex.trim().trim_start_matches("0x").trim_start_matches("0X");
        if digits.is_empty() {
            return Err(Error::ParseConfig(String::from(hex)));
        }
        let mut c = Self::empty(len);
        for (nibble_idx, ch) in digits.chars().rev().enumerate() {
            let v = ch.to_digit(16).ok_or_else(|| Error::ParseConfig(String::from(hex)))?;
            for bit in 0..4 {
                if v & (1 << bit) != 0 {
                    let p = 4 * nibble_idx + bit;
                    if p >= len {
                        return Err(Error::ParseConfig(alloc::format!("{hex} has bits beyond {len} plaquettes")));
                    }
                    c.set(p, true);
                }
            }
        }
        Ok(c)
    }

    pub fn to_hex(&self) -> String {
        use core::fmt::Write;
        let mut s = String::from("0x");
        let mut started = false;
        for (w_idx, w) in self.words.iter().enumerate().rev() {
            if !started {
                if *w == 0 && w_idx != 0 {
                    continue;
                }
                write!(s, "{w:x}").unwrap();
                started = true;
            } else {
                write!(s, "{w:016x}").unwrap();
            }
        }
        s
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.weight == 0
    }

    pub fn weight(&self) -> usize {
        self.weight
    }

    pub fn contains(&self, p: usize) -> bool {
        p < self.len && self.words[p / 64] >> (p % 64) & 1 == 1
    }

    pub fn set(&mut self, p: usize, on: bool) {
        assert!(p < self.len, "plaquette {p} out of range");
        if self.contains(p) != on {
            self.words[p / 64] ^= 1 << (p % 64);
            if on {
                self.weight += 1;
            } else {
                self.weight -= 1;
            }
        }
    }

    pub fn toggled(&self, p: usize) -> Self {
        let mut c = self.clone();
        let on = !c.contains(p);
        c.set(p, on);
        c
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&p| self.contains(p))
    }

    /// Low 64 bits.
    pub fn low_bits(&self) -> u64 {
        self.words[0]
    }
}

impl fmt::Display for FlipConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

/// A ground configuration with the position-3 spin of one plaquette flipped.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExcitedLabel {
    pub base: FlipConfig,
    pub flipped_plaquette: usize,
}

pub fn excite(config: &FlipConfig, i: usize) -> Result<ExcitedLabel> {
    if i >= config.len() {
        return Err(Error::PlaquetteOutOfRange { index: i, count: config.len() });
    }
    Ok(ExcitedLabel { base: config.clone(), flipped_plaquette: i })
}

/// Any state of the working basis: a ground configuration or an excitation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StateLabel {
    Ground(FlipConfig),
    Excited(ExcitedLabel),
}

impl StateLabel {
    pub fn config(&self) -> &FlipConfig {
        match self {
            StateLabel::Ground(c) => c,
            StateLabel::Excited(e) => &e.base,
        }
    }

    pub fn excitation(&self) -> Option<&ExcitedLabel> {
        match self {
            StateLabel::Ground(_) => None,
            StateLabel::Excited(e) => Some(e),
        }
    }

    /// Excited plaquette index, or -1 for ground states.
    pub fn plaquette_or_neg(&self) -> i64 {
        self.excitation().map_or(-1, |e| e.flipped_plaquette as i64)
    }
}

impl fmt::Display for StateLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateLabel::Ground(c) => write!(f, "g:{c}"),
            StateLabel::Excited(e) => write!(f, "e:{}@{}", e.base, e.flipped_plaquette),
        }
    }
}

impl From<FlipConfig> for StateLabel {
    fn from(c: FlipConfig) -> Self {
        StateLabel::Ground(c)
    }
}

impl From<ExcitedLabel> for StateLabel {
    fn from(e: ExcitedLabel) -> Self {
        StateLabel::Excited(e)
    }
}

/// Lexicographic iterator over the `C(N, k)` configurations of weight `k`.
#[derive(Debug, Clone)]
pub struct WeightClass {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Iterator for WeightClass {
    type Item = FlipConfig;

    fn next(&mut self) -> Option<FlipConfig> {
        let combo = self.current.as_mut()?;
        let out = FlipConfig::from_indices(self.n, combo).expect("indices below n");
        let k = combo.len();
        // Advance to the next combination in lexicographic order.
        let mut idx = k;
        loop {
            if idx == 0 {
                self.current = None;
                break;
            }
            idx -= 1;
            if combo[idx] < self.n - k + idx {
                combo[idx] += 1;
                for j in idx + 1..k {
                    combo[j] = combo[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}

pub fn enumerate_weight_class(n: usize, k: usize) -> Result<WeightClass> {
    if k > n {
        return Err(Error::WeightOutOfRange { k, n });
    }
    Ok(WeightClass { n, current: Some((0..k).collect()) })
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SiteSignMap {
    signs: Vec<i8>,
}

impl SiteSignMap {
    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn sign(&self, site: usize) -> i8 {
        self.signs[site]
    }

    /// Sites with sign −1, packed into a bitmask (n_sites ≤ 128).
    pub fn negative_mask(&self) -> u128 {
        self.signs
            .iter()
            .enumerate()
            .filter(|(_, &s)| s < 0)
            .fold(0u128, |m, (k, _)| m | 1u128 << k)
    }
}

pub fn flip_signature(
    geom: &LatticeGeometry,
    config: &FlipConfig,
    excitation: Option<&ExcitedLabel>,
) -> Result<SiteSignMap> {
    if config.len() != geom.n_plaquettes() {
        return Err(Error::ConfigLength { expected: geom.n_plaquettes(), got: config.len() });
    }
    let mut signs: Vec<i8> = (0..geom.n_sites())
        .map(|s| {
            let flips = geom.incident_plaquettes(s).iter().filter(|(p, _)| config.contains(*p)).count();
            if flips % 2 == 0 {
                1
            } else {
                -1
            }
        })
        .collect();
    if let Some(e) = excitation {
        if &e.base != config {
            return Err(Error::ExcitationMismatch);
        }
        let site = geom.plaquette(e.flipped_plaquette)?[2];
        signs[site] = -signs[site];
    }
    Ok(SiteSignMap { signs })
}

pub fn label_signature(geom: &LatticeGeometry, label: &StateLabel) -> Result<SiteSignMap> {
    flip_signature(geom, label.config(), label.excitation())
}

/// Position-3 sites whose owner is a different plaquette: exciting such a
/// plaquette flips a spin whose label is not the z component.
pub fn foreign_position3_plaquettes(geom: &LatticeGeometry) -> Vec<(usize, Component)> {
    (0..geom.n_plaquettes())
        .filter_map(|p| {
            let site = geom.plaquettes()[p][2];
            let comp = site_component(geom, site).ok()?;
            (geom.owner(site).ok()?.0 != p).then_some((p, comp))
        })
        .collect()
}

/// Product ket: every site in the eigenstate of its labeled component with
/// eigenvalue given by the sign map.
pub fn product_ket(components: &[Component], signs: &SiteSignMap) -> Ket {
    let n = components.len();
    let mut amps = vec![Complex64::new(1.0, 0.0)];
    amps.reserve((1usize << n) - 1);
    for (k, &comp) in components.iter().enumerate() {
        let v = comp.eigenvector(signs.sign(k));
        let half = amps.len();
        amps.extend_from_within(..);
        for b in 0..half {
            let a = amps[b];
            amps[b] = a * v[0];
            amps[b + half] = a * v[1];
        }
        debug_assert_eq!(amps.len(), 1 << (k + 1));
    }
    Ket::from_amplitudes(n, amps).expect("length is 2^n")
}

pub fn build_product_ket(
    geom: &LatticeGeometry,
    config: &FlipConfig,
    excitation: Option<&ExcitedLabel>,
    cap: HilbertCap,
) -> Result<Ket> {
    cap.check(geom.n_sites())?;
    let signs = flip_signature(geom, config, excitation)?;
    Ok(product_ket(&geom.site_components(), &signs))
}

pub fn label_ket(geom: &LatticeGeometry, label: &StateLabel, cap: HilbertCap) -> Result<Ket> {
    build_product_ket(geom, label.config(), label.excitation(), cap)
}

/// Normalized uniform superposition over the weight-`k` class, scaled by
/// `1/√C(N,k)`.
pub fn weight_class_ket(geom: &LatticeGeometry, k: usize, cap: HilbertCap) -> Result<Ket> {
    cap.check(geom.n_sites())?;
    let n = geom.n_plaquettes();
    let components = geom.site_components();
    let mut acc = Ket::zeros(geom.n_sites());
    let scale = Complex64::new(1.0 / (binomial(n, k) as f64).sqrt(), 0.0);
    for config in enumerate_weight_class(n, k)? {
        let signs = flip_signature(geom, &config, None)?;
        acc.axpy(scale, &product_ket(&components, &signs));
    }
    Ok(acc)
}

/// Pairs of distinct configurations that share a site-sign signature. Empty
/// iff the plaquette→site incidence matrix mod 2 has a trivial kernel.
pub fn signature_collisions(geom: &LatticeGeometry) -> Result<Vec<(FlipConfig, FlipConfig)>> {
    let n = geom.n_plaquettes();
    if n > 20 || geom.n_sites() > 128 {
        return Err(Error::InvalidParameter(alloc::format!(
            "exhaustive signature check limited to 20 plaquettes, got {n}"
        )));
    }
    let mut seen: BTreeMap<u128, FlipConfig> = BTreeMap::new();
    let mut collisions = Vec::new();
    for bits in 0..(1u64 << n) {
        let config = FlipConfig::from_u64(n, bits)?;
        let mask = flip_signature(geom, &config, None)?.negative_mask();
        match seen.get(&mask) {
            Some(first) => collisions.push((first.clone(), config)),
            None => {
                seen.insert(mask, config);
            }
        }
    }
    Ok(collisions)
}
