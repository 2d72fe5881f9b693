//! The fully unitary protocol: a thermal ancilla is coupled to A, carried to
//! B, and coupled again — no measurement, no classical signal.

use super::outcome::{expected_energy, ProtocolOutcome};
use crate::error::{Error, Result};
use crate::model::{
    ancilla_hamiltonian, gibbs_state, hamiltonian_2q, hamiltonian_with_ancilla, AncillaModel,
    TwoQubitModel,
};
use crate::qcore::{embed, expm_hermitian, pauli_x, pauli_y, pauli_z, Operator};
use num_complex::Complex64;

/// Real 3×3 matrix of rotation-generator weights, indexed by Pauli axes
/// (0,1,2) = (x,y,z): entry `[i][j]` multiplies σ_i on the system qubit and
/// σ_j on the ancilla.
///
/// Entries are not required to be symmetric — the benchmark couplings
/// (single (y,y) and (x,z) entries) are not.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingMatrix {
    entries: [[f64; 3]; 3],
}

impl CouplingMatrix {
    pub fn new(entries: [[f64; 3]; 3]) -> Result<Self> {
        for row in &entries {
            for v in row {
                if !v.is_finite() {
                    return Err(Error::InvalidArgument("coupling entry not finite".into()));
                }
            }
        }
        Ok(Self { entries })
    }

    pub fn zeros() -> Self {
        Self { entries: [[0.0; 3]; 3] }
    }

    /// A single nonzero entry: σ_{row_axis}^sys · σ_{col_axis}^anc · weight.
    pub fn single(row_axis: usize, col_axis: usize, weight: f64) -> Result<Self> {
        if row_axis > 2 || col_axis > 2 {
            return Err(Error::BadIndex(format!(
                "Pauli axis out of range: ({row_axis}, {col_axis})"
            )));
        }
        if !weight.is_finite() {
            return Err(Error::InvalidArgument("coupling entry not finite".into()));
        }
        let mut entries = [[0.0; 3]; 3];
        entries[row_axis][col_axis] = weight;
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[[f64; 3]; 3] {
        &self.entries
    }

    /// Row-major flattening, for optimizer parameter vectors.
    pub fn from_flat(x: &[f64]) -> Result<Self> {
        if x.len() != 9 {
            return Err(Error::BadLength { expected: 9, got: x.len() });
        }
        let mut entries = [[0.0; 3]; 3];
        for (i, v) in x.iter().enumerate() {
            entries[i / 3][i % 3] = *v;
        }
        Self::new(entries)
    }

    pub fn flat(&self) -> [f64; 9] {
        let mut out = [0.0; 9];
        for i in 0..3 {
            for j in 0..3 {
                out[3 * i + j] = self.entries[i][j];
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.flat().iter().fold(0.0, |a, v| a.max(v.abs()))
    }
}

fn pauli(axis: usize) -> Operator {
    match axis {
        0 => pauli_x(),
        1 => pauli_y(),
        _ => pauli_z(),
    }
}

/// U = exp(i·Σ_{ij} c[i][j]·σ_i^{system}·σ_j^{ancilla}) on an n-qubit
/// register. The generator is Hermitian (real weights, Paulis on distinct
/// qubits), so the result is exactly unitary up to eigensolver roundoff.
pub fn coupling_unitary(
    c: &CouplingMatrix,
    system_qubit: usize,
    n: usize,
    ancilla: usize,
) -> Result<Operator> {
    if system_qubit >= n || ancilla >= n || system_qubit == ancilla {
        return Err(Error::BadIndex(format!(
            "coupling needs two distinct qubits below {n}, got ({system_qubit}, {ancilla})"
        )));
    }
    let mut generator = Operator::zeros(n);
    for i in 0..3 {
        for j in 0..3 {
            let w = c.entries[i][j];
            if w == 0.0 {
                continue;
            }
            let term = &embed(&pauli(i), system_qubit, n)? * &embed(&pauli(j), ancilla, n)?;
            generator = &generator + &(&term * w);
        }
    }
    expm_hermitian(&generator, Complex64::new(0.0, 1.0))
}

/// Run the unitary protocol: thermal pair ⊗ thermal ancilla, couple the
/// ancilla to A with weights `j`, then to B with weights `k`.
///
/// The initial state is gibbs(pair) ⊗ gibbs(ancilla) at the same β — the
/// ancilla does not appear in the pair Hamiltonian, so this *is* the joint
/// Gibbs state. Energies are accounted against the full three-qubit
/// Hamiltonian: the A-coupling injects, the B-coupling extracts.
pub fn run_qet2a(
    model: &TwoQubitModel,
    anc: &AncillaModel,
    beta: f64,
    j: &CouplingMatrix,
    k: &CouplingMatrix,
) -> Result<ProtocolOutcome> {
    let rho_pair = gibbs_state(&hamiltonian_2q(model), beta)?;
    let rho_anc = gibbs_state(&ancilla_hamiltonian(anc), beta)?;
    let rho0 = rho_pair.product(&rho_anc);

    let u_a = coupling_unitary(j, 0, 3, 2)?;
    let u_b = coupling_unitary(k, 1, 3, 2)?;
    let rho1 = rho0.evolve(&u_a)?;
    let rho2 = rho1.evolve(&u_b)?;

    let h3 = hamiltonian_with_ancilla(model, anc);
    let e0 = expected_energy(&rho0, &h3)?;
    let e1 = expected_energy(&rho1, &h3)?;
    let e2 = expected_energy(&rho2, &h3)?;

    let rho_b = rho2.partial_trace(&[1])?;
    Ok(ProtocolOutcome {
        purity_b: rho_b.purity(),
        polarization_b: rho_b.polarization()?,
        energy_injected_a: e1 - e0,
        energy_extracted_b: e1 - e2,
        per_branch: Vec::new(),
        rho_final: rho2,
    })
}

/// Literal transcription of a closed-form estimate for B's final purity
/// under the benchmark couplings (single unit (y,y) and (x,z) entries).
///
/// Kept for reference only: its normalization does not track the matrix
/// pipeline away from special points, and it divides by zero at k = 0. The
/// simulation is authoritative; `verify` reports the deviation magnitude
/// instead of asserting agreement.
pub fn qet2a_reference_purity(model: &TwoQubitModel, anc: &AncillaModel, beta: f64) -> f64 {
    let (h_a, h_b) = (model.h(), model.h());
    let h_c = anc.h_an();
    let k = model.k();

    let h_plus = (h_a + h_b) * (h_a + h_b) + k * k;
    let h_minus = (h_a - h_b) * (h_a - h_b) + k * k;
    let h_r = (0.5 * (h_minus * h_minus + h_plus * h_plus) - 8.0 * h_a * h_a * h_b * h_b).sqrt();
    let s_plus = (h_plus * beta).sqrt().sinh();
    let s_minus = (h_minus * beta).sqrt().sinh();
    let c_plus = (h_plus * beta).sqrt().cosh();
    let c_minus = (h_minus * beta).sqrt().cosh();

    let shared = k * k * (2.0f64).sin().powi(4) * (beta * h_c).tanh().powi(2);
    let t_plus = (h_a + h_b) * (h_a + h_b) + shared;
    let t_minus = (h_a - h_b) * (h_a - h_b) + shared;
    let t_a = h_a * h_a + shared;

    let numerator = h_minus * s_plus * s_plus * t_plus
        + s_minus * s_minus * (h_plus * t_minus + 2.0 * h_b * h_b * h_r)
        - 2.0 * h_r * s_plus * s_minus * t_a;
    let denom = 2.0 * (c_minus + c_plus) * (c_minus + c_plus) * h_minus * h_plus;
    0.5 + numerator / denom
}
