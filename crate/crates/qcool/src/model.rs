//! The coupled two-qubit model and its thermal states.
//!
//! Base system: two qubits A (index 0) and B (index 1) with
//!
//! ```text
//! H = h σ_z^A + h σ_z^B + 2k σ_x^A σ_x^B + 2 f (1 + k²/h²) 𝟙,
//! f = h² / √(h² + k²),
//! ```
//!
//! so the constant shift equals 2E with E = √(h² + k²) and the spectrum is
//! exactly {0, 2E − 2k, 2E + 2k, 4E}. The ground state lives in the
//! span{|11⟩, |00⟩} block and is entangled for k > 0, which is the whole
//! point: a local measurement on A steers B through that correlation.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qcore::{embed, hermitian_eig, pauli_x, pauli_z, DensityMatrix, Operator};

/// Field/coupling pair with h > 0, k ≥ 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoQubitModel {
    h: f64,
    k: f64,
}

impl TwoQubitModel {
    pub fn new(h: f64, k: f64) -> Result<Self> {
        if !(h.is_finite() && k.is_finite()) || h <= 0.0 || k < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "need finite h > 0 and k ≥ 0, got h = {h}, k = {k}"
            )));
        }
        Ok(Self { h, k })
    }

    /// Unit field, coupling given as the ratio k/h.
    pub fn with_unit_h(k_over_h: f64) -> Result<Self> {
        Self::new(1.0, k_over_h)
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    /// E = √(h² + k²), the natural energy scale of the pair.
    pub fn energy_scale(&self) -> f64 {
        self.h.hypot(self.k)
    }
}

/// Field/coupling pair for the open 3-qubit chain; same parameter domain
/// as [`TwoQubitModel`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChainModel3 {
    h: f64,
    k: f64,
}

impl ChainModel3 {
    pub fn new(h: f64, k: f64) -> Result<Self> {
        if !(h.is_finite() && k.is_finite()) || h <= 0.0 || k < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "need finite h > 0 and k ≥ 0, got h = {h}, k = {k}"
            )));
        }
        Ok(Self { h, k })
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn k(&self) -> f64 {
        self.k
    }
}

/// Non-interacting ancilla qubit with Hamiltonian h_an σ_z, h_an ≥ 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AncillaModel {
    h_an: f64,
}

impl AncillaModel {
    pub fn new(h_an: f64) -> Result<Self> {
        if !h_an.is_finite() || h_an < 0.0 {
            return Err(Error::InvalidArgument(format!("need finite h_an ≥ 0, got {h_an}")));
        }
        Ok(Self { h_an })
    }

    pub fn h_an(&self) -> f64 {
        self.h_an
    }
}

/// f = h²/√(h² + k²), the field-dependent part of the spectral shift.
pub fn shift_f(h: f64, k: f64) -> f64 {
    h * h / h.hypot(k)
}

/// The two-qubit Hamiltonian, shift included (ground energy exactly 0 up to
/// rounding).
pub fn hamiltonian_2q(model: &TwoQubitModel) -> Operator {
    let (h, k) = (model.h, model.k);
    let za = embed(&pauli_z(), 0, 2).expect("valid");
    let zb = embed(&pauli_z(), 1, 2).expect("valid");
    let xx = pauli_x().kron(&pauli_x());
    let shift = 2.0 * shift_f(h, k) * (1.0 + (k / h) * (k / h));
    let field = &(&za * h) + &(&zb * h);
    &(&field + &(&xx * (2.0 * k))) + &(&Operator::identity(2) * shift)
}

/// Exact ground state (F₋|11⟩ − F₊|00⟩)/√2 with F± = √(1 ± h/E), as a
/// density matrix.
pub fn ground_state_2q(model: &TwoQubitModel) -> DensityMatrix {
    let ratio = model.h / model.energy_scale();
    let f_minus = (1.0 - ratio).sqrt();
    let f_plus = (1.0 + ratio).sqrt();
    let inv = 1.0 / 2.0f64.sqrt();
    let ket = [
        Complex64::new(f_minus * inv, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(-f_plus * inv, 0.0),
    ];
    DensityMatrix::pure(&ket).expect("unit-norm ket")
}

/// Purity and Bloch-length polarization of B in the ground state:
/// ((2h² + k²)/(2(h² + k²)), h/√(h² + k²)).
///
/// The returned polarization is the magnitude |r⃗_B| = √(2P − 1); the signed
/// Tr(σ_z ρ_B) is −h/E because the ground state leans toward |00⟩.
pub fn initial_metrics_b(model: &TwoQubitModel) -> (f64, f64) {
    let (h2, k2) = (model.h * model.h, model.k * model.k);
    let purity = (2.0 * h2 + k2) / (2.0 * (h2 + k2));
    let polarization = model.h / model.energy_scale();
    (purity, polarization)
}

/// exp(−βH)/Z for any Hermitian H and β ≥ 0. Eigenvalues are shifted by
/// λ_min before exponentiating so large β cannot overflow.
pub fn gibbs_state(hamiltonian: &Operator, beta: f64) -> Result<DensityMatrix> {
    if !beta.is_finite() || beta < 0.0 {
        return Err(Error::InvalidArgument(format!("need finite β ≥ 0, got {beta}")));
    }
    let eig = hermitian_eig(hamiltonian)?;
    let lam0 = eig.eigenvalues[0];
    let z: f64 = eig.eigenvalues.iter().map(|&l| (-beta * (l - lam0)).exp()).sum();
    let rho = eig.apply(|l| Complex64::new((-beta * (l - lam0)).exp() / z, 0.0));
    DensityMatrix::new(rho)
}

/// Single-qubit ancilla Hamiltonian h_an σ_z (no shift).
pub fn ancilla_hamiltonian(anc: &AncillaModel) -> Operator {
    &pauli_z() * anc.h_an
}

/// Pair Hamiltonian extended by a non-interacting ancilla as qubit 2:
/// H ⊗ 𝟙 + 𝟙⊗𝟙 ⊗ h_an σ_z.
pub fn hamiltonian_with_ancilla(model: &TwoQubitModel, anc: &AncillaModel) -> Operator {
    let h2q = hamiltonian_2q(model).kron(&Operator::identity(1));
    let han = Operator::identity(2).kron(&ancilla_hamiltonian(anc));
    &h2q + &han
}

/// Open three-qubit σ_xσ_x chain with uniform field and no shift:
/// h Σᵢ σ_zⁱ + k (σ_x⁰σ_x¹ + σ_x¹σ_x²). Used by the compression benchmark.
pub fn hamiltonian_chain3(model: &ChainModel3) -> Operator {
    let mut out = Operator::zeros(3);
    for q in 0..3 {
        out = &out + &(&embed(&pauli_z(), q, 3).expect("valid") * model.h);
    }
    for q in 0..2 {
        let xx = &embed(&pauli_x(), q, 3).expect("valid") * &embed(&pauli_x(), q + 1, 3).expect("valid");
        out = &out + &(&xx * model.k);
    }
    out
}
