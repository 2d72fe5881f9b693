//! Dense complex operators on n-qubit registers.

use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense operator on an n-qubit register (dimension 2^n, n ≥ 0).
///
/// Basis index bits read qubits left to right: qubit 0 is the most
/// significant bit. Bit value 0 ↔ |1⟩ (σ_z = +1), bit value 1 ↔ |0⟩.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    mat: DMatrix<Complex64>,
    n_qubits: usize,
}

impl Operator {
    /// Wrap a square matrix whose dimension is a power of two.
    pub fn from_matrix(mat: DMatrix<Complex64>) -> Result<Self> {
        let (r, c) = mat.shape();
        if r != c {
            return Err(Error::DimensionMismatch(format!("matrix is {r}x{c}, not square")));
        }
        if r < 2 || !r.is_power_of_two() {
            return Err(Error::DimensionMismatch(format!(
                "dimension {r} is not a power of two ≥ 2"
            )));
        }
        let n_qubits = r.trailing_zeros() as usize;
        Ok(Self { mat, n_qubits })
    }

    /// Build elementwise from a closure over (row, col).
    pub fn from_fn(n_qubits: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let dim = 1usize << n_qubits;
        Self { mat: DMatrix::from_fn(dim, dim, f), n_qubits }
    }

    /// Diagonal operator from real entries (length must be a power of two).
    pub fn from_diag(entries: &[f64]) -> Result<Self> {
        let d = entries.len();
        if d < 2 || !d.is_power_of_two() {
            return Err(Error::DimensionMismatch(format!(
                "diagonal length {d} is not a power of two ≥ 2"
            )));
        }
        let mut mat = DMatrix::zeros(d, d);
        for (i, &v) in entries.iter().enumerate() {
            mat[(i, i)] = Complex64::new(v, 0.0);
        }
        Ok(Self { mat, n_qubits: d.trailing_zeros() as usize })
    }

    pub fn zeros(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        Self { mat: DMatrix::zeros(dim, dim), n_qubits }
    }

    pub fn identity(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        Self { mat: DMatrix::identity(dim, dim), n_qubits }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.mat[(row, col)]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.mat[(row, col)] = value;
    }

    pub fn adjoint(&self) -> Self {
        Self { mat: self.mat.adjoint(), n_qubits: self.n_qubits }
    }

    pub fn trace(&self) -> Complex64 {
        self.mat.trace()
    }

    /// Max elementwise |M − M†|; zero for exactly Hermitian matrices.
    pub fn hermiticity_deviation(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in i..d {
                let dev = (self.mat[(i, j)] - self.mat[(j, i)].conj()).norm();
                if dev > worst {
                    worst = dev;
                }
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }

    /// (M + M†)/2 — used to scrub rounding noise before eigendecomposition.
    pub fn hermitian_part(&self) -> Self {
        let mat = (&self.mat + self.mat.adjoint()) * Complex64::new(0.5, 0.0);
        Self { mat, n_qubits: self.n_qubits }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.mat.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Tensor product; `self` becomes the more significant factor.
    pub fn kron(&self, other: &Operator) -> Operator {
        Operator {
            mat: self.mat.kronecker(&other.mat),
            n_qubits: self.n_qubits + other.n_qubits,
        }
    }

    /// Trace out every qubit not listed in `keep`.
    ///
    /// `keep` must be non-empty, strictly increasing and within range; the
    /// kept qubits retain their relative order in the reduced register.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Operator> {
        let n = self.n_qubits;
        if keep.is_empty() {
            return Err(Error::BadIndex("keep list is empty".into()));
        }
        for w in keep.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::BadIndex(format!("keep list {keep:?} is not strictly increasing")));
            }
        }
        if let Some(&q) = keep.last() {
            if q >= n {
                return Err(Error::BadIndex(format!("qubit {q} out of range for {n} qubits")));
            }
        }
        let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
        let kd = 1usize << keep.len();
        let td = 1usize << traced.len();
        let mut out = DMatrix::zeros(kd, kd);
        for a in 0..kd {
            for b in 0..kd {
                let mut sum = Complex64::new(0.0, 0.0);
                for t in 0..td {
                    let row = inject(a, keep, n) | inject(t, &traced, n);
                    let col = inject(b, keep, n) | inject(t, &traced, n);
                    sum += self.mat[(row, col)];
                }
                out[(a, b)] = sum;
            }
        }
        Ok(Operator { mat: out, n_qubits: keep.len() })
    }
}

/// Spread the bits of `sub` (MSB first) onto the full-register bit
/// positions of `qubits` (qubit 0 = most significant bit of the register).
pub(crate) fn inject(sub: usize, qubits: &[usize], n: usize) -> usize {
    let q = qubits.len();
    let mut full = 0usize;
    for (j, &pos) in qubits.iter().enumerate() {
        let bit = (sub >> (q - 1 - j)) & 1;
        full |= bit << (n - 1 - pos);
    }
    full
}

/// Lift a single-qubit operator to `n_total` qubits, acting on `position`.
pub fn embed(op: &Operator, position: usize, n_total: usize) -> Result<Operator> {
    if op.n_qubits() != 1 {
        return Err(Error::DimensionMismatch(format!(
            "embed expects a single-qubit operator, got {} qubits",
            op.n_qubits()
        )));
    }
    if position >= n_total {
        return Err(Error::BadIndex(format!("position {position} out of range for {n_total} qubits")));
    }
    let mut out = if position == 0 { op.clone() } else { Operator::identity(1) };
    for q in 1..n_total {
        if q == position {
            out = out.kron(op);
        } else {
            out = out.kron(&Operator::identity(1));
        }
    }
    Ok(out)
}

/// ‖A − B‖_F. Panics on dimension mismatch.
pub fn frobenius_distance(a: &Operator, b: &Operator) -> f64 {
    assert_eq!(a.dim(), b.dim(), "frobenius_distance: dimension mismatch");
    (&a.mat - &b.mat).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn pauli_x() -> Operator {
    Operator::from_fn(1, |i, j| {
        if i != j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) }
    })
}

pub fn pauli_y() -> Operator {
    // σ_y |1⟩ = i|0⟩, σ_y |0⟩ = −i|1⟩ in this component order.
    Operator::from_fn(1, |i, j| match (i, j) {
        (0, 1) => Complex64::new(0.0, -1.0),
        (1, 0) => Complex64::new(0.0, 1.0),
        _ => Complex64::new(0.0, 0.0),
    })
}

pub fn pauli_z() -> Operator {
    Operator::from_fn(1, |i, j| match (i, j) {
        (0, 0) => Complex64::new(1.0, 0.0),
        (1, 1) => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 0.0),
    })
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim(), rhs.dim(), "operator add: dimension mismatch");
        Operator { mat: &self.mat + &rhs.mat, n_qubits: self.n_qubits }
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim(), rhs.dim(), "operator sub: dimension mismatch");
        Operator { mat: &self.mat - &rhs.mat, n_qubits: self.n_qubits }
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim(), rhs.dim(), "operator mul: dimension mismatch");
        Operator { mat: &self.mat * &rhs.mat, n_qubits: self.n_qubits }
    }
}

impl Mul<Complex64> for &Operator {
    type Output = Operator;
    fn mul(self, rhs: Complex64) -> Operator {
        Operator { mat: &self.mat * rhs, n_qubits: self.n_qubits }
    }
}

impl Mul<f64> for &Operator {
    type Output = Operator;
    fn mul(self, rhs: f64) -> Operator {
        self * Complex64::new(rhs, 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn re(op: &Operator, i: usize, j: usize) -> f64 {
        op.get(i, j).re
    }

    #[test]
    fn pauli_z_diag_and_sign_convention() {
        let z = pauli_z();
        assert_eq!(re(&z, 0, 0), 1.0);
        assert_eq!(re(&z, 1, 1), -1.0);
    }

    #[test]
    fn pauli_algebra() {
        let (x, y, z) = (pauli_x(), pauli_y(), pauli_z());
        // σ_x σ_y = i σ_z
        let xy = &x * &y;
        let iz = &z * Complex64::new(0.0, 1.0);
        assert!(frobenius_distance(&xy, &iz) < 1e-15);
        // σ_y² = 1
        assert!(frobenius_distance(&(&y * &y), &Operator::identity(1)) < 1e-15);
    }

    #[test]
    fn kron_is_first_factor_most_significant() {
        let zz = pauli_z().kron(&pauli_z());
        let diag: Vec<f64> = (0..4).map(|i| re(&zz, i, i)).collect();
        assert_eq!(diag, vec![1.0, -1.0, -1.0, 1.0]);

        let z1 = pauli_z().kron(&Operator::identity(1));
        let diag: Vec<f64> = (0..4).map(|i| re(&z1, i, i)).collect();
        assert_eq!(diag, vec![1.0, 1.0, -1.0, -1.0]);
    }

    #[test]
    fn embed_matches_kron() {
        let z0 = embed(&pauli_z(), 0, 2).unwrap();
        assert!(frobenius_distance(&z0, &pauli_z().kron(&Operator::identity(1))) < 1e-15);
        let z1 = embed(&pauli_z(), 1, 2).unwrap();
        assert!(frobenius_distance(&z1, &Operator::identity(1).kron(&pauli_z())) < 1e-15);
        assert!(embed(&pauli_z(), 2, 2).is_err());
        assert!(embed(&Operator::identity(2), 0, 3).is_err());
    }

    #[test]
    fn partial_trace_of_product_recovers_factors() {
        // diag operators with distinct traces make the factors easy to check
        let a = Operator::from_diag(&[2.0, 3.0]).unwrap();
        let b = Operator::from_diag(&[5.0, 7.0]).unwrap();
        let ab = a.kron(&b);
        let ta = ab.partial_trace(&[0]).unwrap(); // trace out qubit 1
        assert_abs_diff_eq!(ta.get(0, 0).re, 2.0 * 12.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ta.get(1, 1).re, 3.0 * 12.0, epsilon = 1e-12);
        let tb = ab.partial_trace(&[1]).unwrap();
        assert_abs_diff_eq!(tb.get(0, 0).re, 5.0 * 5.0, epsilon = 1e-12);
        assert_abs_diff_eq!(tb.get(1, 1).re, 7.0 * 5.0, epsilon = 1e-12);
    }

    #[test]
    fn partial_trace_rejects_bad_subsets() {
        let op = Operator::identity(2);
        assert!(op.partial_trace(&[1, 0]).is_err());
        assert!(op.partial_trace(&[0, 0]).is_err());
        assert!(op.partial_trace(&[2]).is_err());
        assert!(op.partial_trace(&[]).is_err());
        // keeping everything is the identity operation
        let full = op.partial_trace(&[0, 1]).unwrap();
        assert!(frobenius_distance(&full, &op) < 1e-15);
    }

    #[test]
    fn frobenius_distance_of_x_and_z_is_two() {
        assert_abs_diff_eq!(frobenius_distance(&pauli_x(), &pauli_z()), 2.0, epsilon = 1e-14);
    }

    #[test]
    fn from_matrix_rejects_bad_shapes() {
        assert!(Operator::from_matrix(DMatrix::zeros(2, 3)).is_err());
        assert!(Operator::from_matrix(DMatrix::zeros(3, 3)).is_err());
        assert!(Operator::from_matrix(DMatrix::zeros(4, 4)).is_ok());
    }

    #[test]
    fn hermiticity_deviation_detects_asymmetry() {
        let mut op = Operator::zeros(1);
        op.set(0, 1, Complex64::new(1.0, 0.0));
        assert!(op.hermiticity_deviation() > 0.5);
        assert!(pauli_y().is_hermitian(0.0));
    }
}
