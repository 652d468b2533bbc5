//! Sub-geometric phase engine for driven flip configurations of the Kitaev
//! honeycomb model.
//!
//! The crate is `no_std` and needs only `alloc`. IO, file formats and the
//! command line live in the companion `kitaev` crate.
#![no_std]

extern crate alloc;

pub mod correlation;
mod error;

pub mod hamiltonian;
pub mod integrator;
pub mod ket;
pub mod lattice;
pub mod manifold;
pub mod oracle;
pub mod density;
pub mod pauli;
pub mod phase;
pub mod perturbation;
pub mod quadrature;

pub use error::{Error, Result};
