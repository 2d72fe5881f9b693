//! Entropy compression: global unitaries that concentrate population onto
//! the target qubit's ground block.
//!
//! Both variants route the largest populations into the same basis ordering:
//! all target-ground basis states first, then all target-excited states,
//! lexicographic in the remaining qubits within each block. The
//! correlation-blind variant may only permute the computational basis; the
//! eigenbasis variant first diagonalizes the state, so it routes eigenvalues
//! instead of diagonal entries.

use crate::error::{Error, Result};
use crate::qcore::{hermitian_eig, DensityMatrix, Operator};
use num_complex::Complex64;

/// Physical basis label (qubit 0 = most significant bit, ground = 0) with
/// `block` at the target position and `rest` spread over the other qubits.
fn physical_label(rest: usize, n: usize, target: usize, block: usize) -> usize {
    let mut label = 0usize;
    let mut rest_bits = n - 1;
    for q in 0..n {
        let bit = if q == target {
            block
        } else {
            rest_bits -= 1;
            (rest >> rest_bits) & 1
        };
        label = (label << 1) | bit;
    }
    label
}

/// Component indices of the sort destination order: target-ground block
/// first, lexicographic physical labels within each block. (Component
/// indices complement physical labels bitwise: component bit 0 = excited.)
fn block_slots(n: usize, target: usize) -> Vec<usize> {
    let d = 1usize << n;
    let mut slots = Vec::with_capacity(d);
    for block in 0..2 {
        for rest in 0..(d / 2) {
            slots.push(!physical_label(rest, n, target, block) & (d - 1));
        }
    }
    slots
}

/// Permutation that sorts the computational-basis populations of `rho` in
/// decreasing order into the target-ground-block-first ordering. Ties keep
/// their original index order, so the result is deterministic.
pub fn population_sort_permutation(rho: &DensityMatrix, target: usize) -> Result<Operator> {
    let n = rho.n_qubits();
    if target >= n {
        return Err(Error::BadIndex(format!(
            "target qubit {target} out of range for {n} qubits"
        )));
    }
    let diag = rho.diagonal();
    let d = rho.dim();
    let mut order: Vec<usize> = (0..d).collect();
    // stable sort: equal populations stay in ascending original order
    order.sort_by(|&a, &b| diag[b].total_cmp(&diag[a]));
    let slots = block_slots(n, target);
    let mut p = Operator::zeros(n);
    for (rank, &src) in order.iter().enumerate() {
        p.set(slots[rank], src, Complex64::new(1.0, 0.0));
    }
    Ok(p)
}

/// Correlation-blind compression: permute the computational basis so the
/// diagonal is sorted; off-diagonals are carried along by conjugation.
pub fn compress_without_correlations(
    rho: &DensityMatrix,
    target: usize,
) -> Result<(Operator, DensityMatrix)> {
    let p = population_sort_permutation(rho, target)?;
    let rho_after = DensityMatrix::new(&(&p * rho.op()) * &p.adjoint())?;
    Ok((p, rho_after))
}

/// Eigenbasis compression: U = P·W† where W diagonalizes the state and P
/// routes eigenvalues in decreasing order onto the block ordering. The
/// output is exactly diagonal in the computational basis, and its target
/// purity is the best any global unitary can do (the sorted eigenvalue
/// vector majorizes every rotation of the spectrum).
pub fn compress_with_correlations(
    rho: &DensityMatrix,
    target: usize,
) -> Result<(Operator, DensityMatrix)> {
    let n = rho.n_qubits();
    if target >= n {
        return Err(Error::BadIndex(format!(
            "target qubit {target} out of range for {n} qubits"
        )));
    }
    let eig = hermitian_eig(rho.op())?;
    let d = rho.dim();
    let slots = block_slots(n, target);
    let mut routing = Operator::zeros(n);
    for j in 0..d {
        // eigenvalues come out ascending; rank them descending
        routing.set(slots[d - 1 - j], j, Complex64::new(1.0, 0.0));
    }
    let u = &routing * &eig.eigenvectors.adjoint();
    let rho_after = DensityMatrix::new(&(&u * rho.op()) * &u.adjoint())?;
    Ok((u, rho_after))
}
