//! Classical emulation of stoquastic quantum spin chains with probabilistic
//! bits.
//!
//! The crate maps 1D quantum Hamiltonians (transverse-field Ising, XYZ
//! Heisenberg) onto classical replica lattices and samples them with
//! sequential p-bit dynamics. An exact diagonalization oracle checks the
//! results; annealing drivers, an invertible multiplier for factorization and
//! a stochastic LLG device model build on the same sampler.

pub mod annealing;
pub mod device;
pub mod error;
pub mod exact;
pub mod experiment;
pub mod factorizer;
pub mod graph;
pub mod histogram;
pub mod sampler;
pub mod trotter;

pub use error::{Error, Result};
pub use graph::{CouplingTerm, InteractionGraph, SliceLayout, TermRef};
pub use histogram::{Histogram, Spin};
