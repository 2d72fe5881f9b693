//! Hermitian eigendecomposition and matrix exponentials built on it.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::operator::Operator;
use super::HERMITICITY_TOL;
use crate::error::{Error, Result};

/// Eigensystem of a Hermitian operator.
///
/// Eigenvalues are ascending; column k of `eigenvectors` is the
/// unit-norm vector for `eigenvalues[k]`.
#[derive(Clone, Debug)]
pub struct EigDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Operator,
}

impl EigDecomposition {
    /// Rebuild V diag(f(λ)) V† for an arbitrary complex function of the
    /// eigenvalues.
    pub fn apply(&self, f: impl Fn(f64) -> Complex64) -> Operator {
        let d = self.eigenvalues.len();
        let v = self.eigenvectors.matrix();
        let mut diag = DMatrix::zeros(d, d);
        for (k, &lam) in self.eigenvalues.iter().enumerate() {
            diag[(k, k)] = f(lam);
        }
        let mat = v * diag * v.adjoint();
        Operator::from_matrix(mat).expect("shape preserved")
    }
}

/// Eigendecomposition of a Hermitian operator, eigenvalues ascending.
///
/// Rejects matrices whose max elementwise |M − M†| exceeds 1e-10; below
/// that the Hermitian part is used, so rounding noise cannot leak into
/// complex eigenvalues.
pub fn hermitian_eig(op: &Operator) -> Result<EigDecomposition> {
    let dev = op.hermiticity_deviation();
    if dev > HERMITICITY_TOL {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let sym = op.hermitian_part();
    let se = sym.matrix().clone().symmetric_eigen();

    let d = op.dim();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));

    let eigenvalues: Vec<f64> = order.iter().map(|&k| se.eigenvalues[k]).collect();
    let mut vecs = DMatrix::zeros(d, d);
    for (new_col, &old_col) in order.iter().enumerate() {
        vecs.set_column(new_col, &se.eigenvectors.column(old_col));
    }
    Ok(EigDecomposition {
        eigenvalues,
        eigenvectors: Operator::from_matrix(vecs).expect("square power-of-two"),
    })
}

/// exp(factor · op) for Hermitian `op` and arbitrary complex `factor`,
/// via eigendecomposition. Imaginary factors give unitaries, negative
/// real factors give (unnormalized) Gibbs weights.
pub fn expm_hermitian(op: &Operator, factor: Complex64) -> Result<Operator> {
    let eig = hermitian_eig(op)?;
    Ok(eig.apply(|lam| (factor * lam).exp()))
}
