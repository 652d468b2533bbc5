//! Single-site Pauli algebra and Pauli strings acting on computational-basis
//! states.
//!
//! Basis convention: site `k` is bit `k` of the basis index, bit 0 is spin up
//! (σ^z = +1).

use core::fmt;
use core::str::FromStr;

use num_complex::Complex64;

use crate::Error;

const FRAC_1_SQRT_2: f64 = core::f64::consts::FRAC_1_SQRT_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Component {
    X,
    Y,
    Z,
}

impl Component {
    pub const ALL: [Component; 3] = [Component::X, Component::Y, Component::Z];

    pub fn as_char(self) -> char {
        match self {
            Component::X => 'x',
            Component::Y => 'y',
            Component::Z => 'z',
        }
    }

    /// Eigenvector of this Pauli component with eigenvalue `sign` (±1), in the
    /// σ^z basis `(amp_up, amp_down)`.
    pub fn eigenvector(self, sign: i8) -> [Complex64; 2] {
        let up = sign >= 0;
        match (self, up) {
            (Component::Z, true) => [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            (Component::Z, false) => [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
            (Component::X, true) => [Complex64::new(FRAC_1_SQRT_2, 0.0), Complex64::new(FRAC_1_SQRT_2, 0.0)],
            (Component::X, false) => [Complex64::new(FRAC_1_SQRT_2, 0.0), Complex64::new(-FRAC_1_SQRT_2, 0.0)],
            (Component::Y, true) => [Complex64::new(FRAC_1_SQRT_2, 0.0), Complex64::new(0.0, FRAC_1_SQRT_2)],
            (Component::Y, false) => [Complex64::new(FRAC_1_SQRT_2, 0.0), Complex64::new(0.0, -FRAC_1_SQRT_2)],
        }
    }

    /// 2x2 matrix of the Pauli operator in the σ^z basis, row-major.
    pub fn matrix(self) -> [[Complex64; 2]; 2] {
        let o = Complex64::new(0.0, 0.0);
        let r = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        match self {
            Component::X => [[o, r], [r, o]],
            Component::Y => [[o, -i], [i, o]],
            Component::Z => [[r, o], [o, -r]],
        }
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

impl FromStr for Component {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "x" | "X" => Ok(Component::X),
            "y" | "Y" => Ok(Component::Y),
            "z" | "Z" => Ok(Component::Z),
            other => Err(Error::InvalidParameter(alloc::format!("unknown Pauli component {other:?}"))),
        }
    }
}

/// `⟨comp, s_out| σ^op |comp, s_in⟩` for single-site labeled eigenstates.
pub fn site_matrix_element(comp: Component, s_out: i8, op: Component, s_in: i8) -> Complex64 {
    let out = comp.eigenvector(s_out);
    let inp = comp.eigenvector(s_in);
    let m = op.matrix();
    let mut acc = Complex64::new(0.0, 0.0);
    for r in 0..2 {
        for c in 0..2 {
            acc += out[r].conj() * m[r][c] * inp[c];
        }
    }
    acc
}

/// Product of Pauli operators on distinct sites.
///
/// Acting on basis index `b` yields `phase(b) · |b ^ flip_mask⟩` with
/// `phase(b) = i^{n_y} · (-1)^{popcount(b & sign_mask)}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PauliString {
    factors: alloc::vec::Vec<(usize, Component)>,
    flip_mask: usize,
    sign_mask: usize,
    n_y: u32,
}

impl PauliString {
    /// Panics if a site appears twice.
    pub fn new(factors: &[(usize, Component)]) -> Self {
        let mut flip_mask = 0usize;
        let mut sign_mask = 0usize;
        let mut seen = 0usize;
        let mut n_y = 0;
        for &(site, comp) in factors {
            let bit = 1usize << site;
            assert!(seen & bit == 0, "site {site} repeated in Pauli string");
            seen |= bit;
            match comp {
                Component::X => flip_mask |= bit,
                Component::Y => {
                    flip_mask |= bit;
                    sign_mask |= bit;
                    n_y += 1;
                }
                Component::Z => sign_mask |= bit,
            }
        }
        Self { factors: factors.to_vec(), flip_mask, sign_mask, n_y }
    }

    pub fn factors(&self) -> &[(usize, Component)] {
        &self.factors
    }

    #[inline]
    pub fn apply_to_basis(&self, b: usize) -> (Complex64, usize) {
        let base = match self.n_y % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        let phase = if (b & self.sign_mask).count_ones() % 2 == 1 { -base } else { base };
        (phase, b ^ self.flip_mask)
    }

    /// `out += coeff · P · input`.
    pub fn apply_add(&self, coeff: Complex64, input: &[Complex64], out: &mut [Complex64]) {
        for (b, &amp) in input.iter().enumerate() {
            if amp.re == 0.0 && amp.im == 0.0 {
                continue;
            }
            let (phase, b2) = self.apply_to_basis(b);
            out[b2] += coeff * phase * amp;
        }
    }

    pub fn apply(&self, input: &[Complex64]) -> alloc::vec::Vec<Complex64> {
        let mut out = alloc::vec![Complex64::new(0.0, 0.0); input.len()];
        self.apply_add(Complex64::new(1.0, 0.0), input, &mut out);
        out
    }

    /// `⟨bra| P |ket⟩`.
    pub fn matrix_element(&self, bra: &[Complex64], ket: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (b, &amp) in ket.iter().enumerate() {
            let (phase, b2) = self.apply_to_basis(b);
            acc += bra[b2].conj() * phase * amp;
        }
        acc
    }
}
