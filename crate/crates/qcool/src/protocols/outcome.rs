//! Result bundle shared by the protocol runners.

use crate::error::{Error, Result};
use crate::qcore::{DensityMatrix, Operator};

/// One measurement branch: outcome probability and the normalized state of
/// the full register after the conditional feedback for that outcome.
#[derive(Debug, Clone)]
pub struct Branch {
    pub probability: f64,
    pub state: DensityMatrix,
}

/// What one protocol run produced.
///
/// `polarization_b` is the literal Tr(σ_z ρ_B); with the basis convention
/// used throughout (component 0 = excited), a qubit leaning toward its
/// ground state has *negative* polarization here. Callers that want the
/// cooling-literature sign (ground-state population excess) negate it.
///
/// Energy bookkeeping: `energy_injected_a` is the energy the measurement (or
/// first coupling) deposits into the register, `energy_extracted_b` the
/// energy the feedback step removes. The ledger closes exactly:
/// initial energy + injected − extracted = Tr[H ρ_final].
#[derive(Debug, Clone)]
pub struct ProtocolOutcome {
    pub rho_final: DensityMatrix,
    pub purity_b: f64,
    pub polarization_b: f64,
    pub energy_injected_a: f64,
    pub energy_extracted_b: f64,
    pub per_branch: Vec<Branch>,
}

/// Tr[Hρ] as a real number.
pub fn expected_energy(rho: &DensityMatrix, hamiltonian: &Operator) -> Result<f64> {
    if rho.dim() != hamiltonian.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state dim {} vs Hamiltonian dim {}",
            rho.dim(),
            hamiltonian.dim()
        )));
    }
    Ok(rho.expectation(hamiltonian).re)
}
