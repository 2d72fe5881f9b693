//! Exact simulation of algorithmic cooling on small qubit registers.
//!
//! The crate brute-forces density matrices on up to four qubits to compare
//! measurement-assisted cooling of a strongly coupled two-qubit system
//! (local filtered measurement on one qubit, conditional feedback on the
//! other) against conventional heat-bath schemes: partner-pairing rounds
//! with a reset qubit, subspace-rethermalization rounds, and plain
//! rethermalization.
//!
//! Layout:
//! - [`qcore`]: dense operators, Hermitian eigendecomposition, density
//!   matrices, partial traces.
//! - [`model`]: the coupled two-qubit Hamiltonian, its exact ground state
//!   and Gibbs states, and the chain/ancilla extensions.
//! - [`protocols`]: the cooling protocols themselves plus energy
//!   bookkeeping.
//! - [`optimize`]: derivative-free maximization of final purity over
//!   measurement/feedback parameters, with constraint handling.

pub mod error;
pub mod model;
pub mod optimize;
pub mod protocols;
pub mod qcore;

pub use error::{Error, Result};
