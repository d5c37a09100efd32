//! Quantum and classical Fisher information of random states.
//!
//! The crate covers distinguishable-particle spaces `(C^d)^⊗N` for small `N`
//! and the bosonic (symmetric) sector in the generalized Dicke basis, where
//! hundreds of particles are cheap. On top of the state and Hamiltonian
//! representations sit Fisher-information kernels, Haar ensembles with a
//! deterministic parallel Monte Carlo driver, particle-loss channels, a
//! Mach-Zehnder measurement model and random linear-optics circuits.
//!
//! Dicke convention: `|D_n^N⟩ = |n, N−n⟩` carries `n` particles in mode `a`,
//! which is single-particle basis state `|0⟩`. In the qubit picture `|D_n⟩`
//! is the uniform superposition of all strings with `n` zeros, and
//! `J_z |D_n⟩ = (n − N/2) |D_n⟩`.

pub mod binom;
pub mod circuits;
pub mod dicke;
mod error;
pub mod fisher;
pub mod hamiltonian;
pub mod interferometer;
pub mod linalg;
pub mod loss;
pub mod lu;
pub mod sampling;
pub mod state;

pub use error::{Error, Result};
pub use linalg::{CMat, CVec, C64};
