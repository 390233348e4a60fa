//! Symmetry-adapted ADAPT-VQE over exact statevectors.
//!
//! Modules, bottom-up: [`fcidump`] (integrals), [`fock`] (determinants and
//! operator algebra), [`pools`], [`symmetry`], [`lie`] (commutators and
//! algebra closure), [`fci`] (exact diagonalization) and [`adapt`].

pub mod adapt;
pub mod error;
pub mod fci;
pub mod fcidump;
pub mod fock;
pub mod pools;
pub mod lie;
pub mod symmetry;

pub use error::{Error, Result};
