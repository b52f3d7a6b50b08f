//! Spectra, polariton structure and steady-state exciton transport of cavity-coupled
//! multichain two-level-system arrays in the zero plus single excitation sector.

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod hamiltonian;
pub mod lattice;
pub mod observables;
pub mod spectrum;
pub mod sweep;

pub use error::{Error, Result};
pub use lattice::{CavityDecay, ConfigurationKind, Drive, LatticeSpec};
