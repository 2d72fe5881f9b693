//! Validated density matrices.

use num_complex::Complex64;

use super::eig::hermitian_eig;
use super::operator::{pauli_z, Operator};
use super::{DENSITY_HERMITICITY_TOL, POSITIVITY_TOL, TRACE_TOL};
use crate::error::{Error, Result};

/// Density matrix: Hermitian (1e-12 elementwise), unit trace (1e-12),
/// eigenvalues ≥ −1e-10. Every constructor and state-changing method
/// re-validates, so holding a `DensityMatrix` is proof the checks passed.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    op: Operator,
}

impl DensityMatrix {
    pub fn new(op: Operator) -> Result<Self> {
        let tr = op.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::NotDensityMatrix(format!(
                "trace = {:.15} + {:.3e}i, expected 1",
                tr.re, tr.im
            )));
        }
        let dev = op.hermiticity_deviation();
        if dev > DENSITY_HERMITICITY_TOL {
            return Err(Error::NotDensityMatrix(format!(
                "not Hermitian (max |ρ - ρ†| element = {dev:.3e})"
            )));
        }
        let eig = hermitian_eig(&op)?;
        let min = eig.eigenvalues[0];
        if min < POSITIVITY_TOL {
            return Err(Error::NotDensityMatrix(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(Self { op })
    }

    /// Projector onto a (not necessarily normalized) ket.
    pub fn pure(ket: &[Complex64]) -> Result<Self> {
        let d = ket.len();
        if d < 2 || !d.is_power_of_two() {
            return Err(Error::DimensionMismatch(format!("ket length {d} is not a power of two ≥ 2")));
        }
        let norm_sqr: f64 = ket.iter().map(|z| z.norm_sqr()).sum();
        if norm_sqr <= 0.0 {
            return Err(Error::InvalidArgument("zero ket".into()));
        }
        let op = Operator::from_fn(d.trailing_zeros() as usize, |i, j| {
            ket[i] * ket[j].conj() / norm_sqr
        });
        Self::new(op)
    }

    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        let op = &Operator::identity(n_qubits) * (1.0 / dim as f64);
        Self { op }
    }

    pub fn op(&self) -> &Operator {
        &self.op
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn n_qubits(&self) -> usize {
        self.op.n_qubits()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.op.get(row, col)
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.op.get(i, i).re).collect()
    }

    /// Tr(ρ²). Equals ‖ρ‖_F² for Hermitian ρ, so no matrix product is needed.
    pub fn purity(&self) -> f64 {
        let p = self.op.frobenius_norm();
        p * p
    }

    /// Tr(σ_z ρ) for a single-qubit state. Positive means excited-leaning
    /// in this sign convention (σ_z|1⟩ = +|1⟩).
    pub fn polarization(&self) -> Result<f64> {
        if self.n_qubits() != 1 {
            return Err(Error::DimensionMismatch(format!(
                "polarization needs a single qubit, got {}",
                self.n_qubits()
            )));
        }
        Ok(self.expectation(&pauli_z()).re)
    }

    /// Tr(A ρ).
    pub fn expectation(&self, a: &Operator) -> Complex64 {
        assert_eq!(a.dim(), self.dim(), "expectation: dimension mismatch");
        let mut sum = Complex64::new(0.0, 0.0);
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                sum += a.get(i, j) * self.op.get(j, i);
            }
        }
        sum
    }

    /// U ρ U†.
    pub fn evolve(&self, u: &Operator) -> Result<DensityMatrix> {
        if u.dim() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "unitary dim {} vs state dim {}",
                u.dim(),
                self.dim()
            )));
        }
        DensityMatrix::new(&(u * &self.op) * &u.adjoint())
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        DensityMatrix::new(self.op.partial_trace(keep)?)
    }

    /// Tensor product of two states.
    pub fn product(&self, other: &DensityMatrix) -> DensityMatrix {
        DensityMatrix { op: self.op.kron(&other.op) }
    }
}
