//! The two-outcome measurement family on σ_x of qubit A and the
//! outcome-conditioned feedback rotation on qubit B.

use crate::error::{Error, Result};
use crate::qcore::{pauli_x, pauli_y, Operator};
use num_complex::Complex64;

/// Tolerance for the POVM completeness and cross-term constraints.
pub const POVM_TOL: f64 = 1e-10;

/// Two-outcome measurement on σ_x of a single qubit:
/// M_μ = e^{iδ_μ} (m_μ·𝟙 + e^{iα_μ}·l_μ·σ_x), outcome index 0 ↔ μ=+1.
///
/// Constraints (both enforced on construction, tolerance [`POVM_TOL`]):
///   Σ_μ (m_μ² + l_μ²) = 1   (completeness, since M_μ†M_μ = (m²+l²)𝟙 + 2ml·cosα·σ_x)
///   Σ_μ m_μ l_μ cos α_μ = 0 (the σ_x cross terms must cancel between outcomes)
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PovmX {
    m: [f64; 2],
    l: [f64; 2],
    alpha: [f64; 2],
    delta: [f64; 2],
}

impl PovmX {
    pub fn new(m: [f64; 2], l: [f64; 2], alpha: [f64; 2], delta: [f64; 2]) -> Result<Self> {
        for v in m.iter().chain(&l).chain(&alpha).chain(&delta) {
            if !v.is_finite() {
                return Err(Error::InvalidArgument("POVM parameter not finite".into()));
            }
        }
        let completeness: f64 = (0..2).map(|i| m[i] * m[i] + l[i] * l[i]).sum();
        if (completeness - 1.0).abs() > POVM_TOL {
            return Err(Error::IncompletePovm(format!(
                "Σ(m²+l²) = {completeness}, must be 1"
            )));
        }
        let cross: f64 = (0..2).map(|i| m[i] * l[i] * alpha[i].cos()).sum();
        if cross.abs() > POVM_TOL {
            return Err(Error::IncompletePovm(format!(
                "Σ m·l·cos α = {cross}, must be 0"
            )));
        }
        Ok(Self { m, l, alpha, delta })
    }

    /// The projective σ_x measurement: M_± = (𝟙 ± σ_x)/2.
    pub fn projective_x() -> Self {
        Self { m: [0.5, 0.5], l: [0.5, -0.5], alpha: [0.0; 2], delta: [0.0; 2] }
    }

    /// The no-measurement limit: M_+ = 𝟙, M_− = 0.
    pub fn trivial() -> Self {
        Self { m: [1.0, 0.0], l: [0.0; 2], alpha: [0.0; 2], delta: [0.0; 2] }
    }

    pub fn m(&self) -> [f64; 2] {
        self.m
    }

    pub fn l(&self) -> [f64; 2] {
        self.l
    }

    pub fn alpha(&self) -> [f64; 2] {
        self.alpha
    }

    pub fn delta(&self) -> [f64; 2] {
        self.delta
    }

    /// p_μ = m_μ² + l_μ². On any state with ⟨σ_x⟩ = 0 (every eigenstate of
    /// the interacting pair, hence every thermal state) this *is* the
    /// probability of outcome μ.
    pub fn branch_weight(&self, outcome: usize) -> f64 {
        self.m[outcome] * self.m[outcome] + self.l[outcome] * self.l[outcome]
    }

    /// q_μ = 2 m_μ l_μ cos α_μ, the σ_x coefficient of M_μ†M_μ.
    pub fn branch_cross(&self, outcome: usize) -> f64 {
        2.0 * self.m[outcome] * self.l[outcome] * self.alpha[outcome].cos()
    }
}

/// The two measurement operators as 2×2 matrices, index 0 ↔ μ=+1.
pub fn povm_operators(p: &PovmX) -> Result<[Operator; 2]> {
    let x = pauli_x();
    let ops: Vec<Operator> = (0..2)
        .map(|i| {
            let phase = Complex64::from_polar(1.0, p.delta()[i]);
            let xc = Complex64::from_polar(p.l()[i], p.alpha()[i]);
            let term = &(&Operator::identity(1) * p.m()[i]) + &(&x * xc);
            &term * phase
        })
        .collect();
    let sum = &(&ops[0].adjoint() * &ops[0]) + &(&ops[1].adjoint() * &ops[1]);
    let dev = crate::qcore::frobenius_distance(&sum, &Operator::identity(1));
    if dev > POVM_TOL {
        return Err(Error::IncompletePovm(format!(
            "ΣM†M deviates from 𝟙 by {dev:.3e}"
        )));
    }
    Ok([ops[0].clone(), ops[1].clone()])
}

/// Feedback rotation angles for qubit B, one per measurement outcome.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BobRotation {
    pub omega_plus: f64,
    pub omega_minus: f64,
}

impl BobRotation {
    pub fn omega(&self, outcome: usize) -> f64 {
        if outcome == 0 {
            self.omega_plus
        } else {
            self.omega_minus
        }
    }
}

/// The rotation angles that maximize B's energy extraction on the ground
/// state: Ω_μ = ½·atan2(−h·k·q_μ, (h²+2k²)·p_μ).
///
/// Equivalent to requiring
///   cos 2Ω_μ = (h²+2k²)·p_μ / √((h²+2k²)²p_μ² + h²k²q_μ²),
///   sin 2Ω_μ = −h·k·q_μ / √(…),
/// which is only degenerate when p_μ = 0 (and then q_μ = 0 follows from
/// |q_μ| ≤ p_μ, so both atan2 arguments vanish).
pub fn hotta_bob_rotation(model: &crate::model::TwoQubitModel, p: &PovmX) -> Result<BobRotation> {
    let (h, k) = (model.h(), model.k());
    let mut omega = [0.0; 2];
    for i in 0..2 {
        let pw = p.branch_weight(i);
        let q = p.branch_cross(i);
        if pw == 0.0 {
            return Err(Error::DegenerateBranch(format!(
                "outcome {i} has zero weight; its feedback angle is undetermined"
            )));
        }
        omega[i] = 0.5 * (-h * k * q).atan2((h * h + 2.0 * k * k) * pw);
    }
    Ok(BobRotation { omega_plus: omega[0], omega_minus: omega[1] })
}

/// Single-qubit feedback rotation U_B(Ω) = cos Ω·𝟙 + i·sin Ω·σ_y.
pub fn bob_unitary(omega: f64) -> Operator {
    let c = Complex64::new(omega.cos(), 0.0);
    let is = Complex64::new(0.0, omega.sin());
    &(&Operator::identity(1) * c) + &(&pauli_y() * is)
}
