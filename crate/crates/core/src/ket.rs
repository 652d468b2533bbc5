//! Dense state vectors over the full `2^n_sites` site Hilbert space.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use num_complex::Complex64;
// Float math for no_std builds; std provides the inherent methods when linked.
#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

/// Default maximum site count for materialized Hilbert vectors.
pub const DEFAULT_HILBERT_CAP: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HilbertCap(pub usize);

impl Default for HilbertCap {
    fn default() -> Self {
        HilbertCap(DEFAULT_HILBERT_CAP)
    }
}

impl HilbertCap {
    pub fn check(self, n_sites: usize) -> Result<()> {
        if n_sites > self.0 || n_sites >= usize::BITS as usize {
            Err(Error::HilbertCap { n_sites, cap: self.0 })
        } else {
            Ok(())
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    n_sites: usize,
    amps: Vec<Complex64>,
}

impl Ket {
    pub fn zeros(n_sites: usize) -> Self {
        Self { n_sites, amps: vec![Complex64::new(0.0, 0.0); 1 << n_sites] }
    }

    pub fn basis(n_sites: usize, index: usize) -> Self {
        let mut k = Self::zeros(n_sites);
        k.amps[index] = Complex64::new(1.0, 0.0);
        k
    }

    pub fn from_amplitudes(n_sites: usize, amps: Vec<Complex64>) -> Result<Self> {
        let expected = 1usize << n_sites;
        if amps.len() != expected {
            return Err(Error::Dimension { expected, got: amps.len() });
        }
        Ok(Self { n_sites, amps })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Ket) -> Complex64 {
        inner(&self.amps, &other.amps)
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amps)
    }

    pub fn scaled(&self, a: Complex64) -> Ket {
        Ket { n_sites: self.n_sites, amps: self.amps.iter().map(|&x| x * a).collect() }
    }

    /// `self += a · other`.
    pub fn axpy(&mut self, a: Complex64, other: &Ket) {
        for (x, &y) in self.amps.iter_mut().zip(&other.amps) {
            *x += a * y;
        }
    }

    pub fn normalized(&self) -> Ket {
        let n = self.norm();
        self.scaled(Complex64::new(1.0 / n, 0.0))
    }

    pub fn require_unit(&self, tol: f64) -> Result<()> {
        let n = self.norm();
        if (n - 1.0).abs() > tol {
            Err(Error::NotNormalized { norm: n })
        } else {
            Ok(())
        }
    }

    pub fn require_dim(&self, n_sites: usize) -> Result<()> {
        if self.n_sites != n_sites || self.amps.len() != 1 << n_sites {
            Err(Error::Dimension { expected: 1 << n_sites, got: self.amps.len() })
        } else {
            Ok(())
        }
    }
}

impl Index<usize> for Ket {
    type Output = Complex64;

    fn index(&self, i: usize) -> &Complex64 {
        &self.amps[i]
    }
}

impl IndexMut<usize> for Ket {
    fn index_mut(&mut self, i: usize) -> &mut Complex64 {
        &mut self.amps[i]
    }
}

pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).fold(Complex64::new(0.0, 0.0), |acc, (x, y)| acc + x.conj() * y)
}

pub fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}
