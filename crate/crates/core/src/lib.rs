//! Three-qubit spin-ring quantum thermal transistor.
//!
//! The ring's Hamiltonian is diagonalized, each qubit's bath coupling is
//! decomposed into dressed-state (global) jump operators, and the resulting
//! Lindblad generator is solved for its nonequilibrium steady state. On top
//! of that sit heat currents, differential resistances, amplification
//! factors, local temperatures and robustness against spurious couplings.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod lindblad;
pub mod model;
pub mod qop;
pub mod robustness;
pub mod steady;

pub use error::{Error, Result};
