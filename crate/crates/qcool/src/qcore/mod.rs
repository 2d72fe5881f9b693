//! Dense operator and density-matrix primitives.
//!
//! Conventions fixed here and relied on everywhere else:
//!
//! - `σ_z = diag(1, −1)`. Component 0 of a single-qubit vector is the
//!   excited state `|1⟩` (σ_z eigenvalue +1); component 1 is the ground
//!   state `|0⟩`.
//! - Tensor products are first-factor-most-significant: qubit 0 supplies
//!   the highest-order bit of a basis index. Two-qubit basis order is
//!   therefore |11⟩, |10⟩, |01⟩, |00⟩.
//! - Eigendecompositions list eigenvalues in ascending order.

mod density;
mod eig;
mod operator;

pub use density::DensityMatrix;
pub use eig::{expm_hermitian, hermitian_eig, EigDecomposition};
pub use operator::{embed, frobenius_distance, pauli_x, pauli_y, pauli_z, Operator};
pub(crate) use operator::inject;

/// Hermiticity gate for eigendecomposition inputs (max elementwise |M − M†|).
pub const HERMITICITY_TOL: f64 = 1e-10;
/// Stricter Hermiticity tolerance applied to density matrices.
pub const DENSITY_HERMITICITY_TOL: f64 = 1e-12;
/// Tolerance for unit-trace checks on density matrices.
pub const TRACE_TOL: f64 = 1e-12;
/// Most negative eigenvalue a density matrix may have before it is
/// rejected as non-positive.
pub const POSITIVITY_TOL: f64 = -1e-10;
