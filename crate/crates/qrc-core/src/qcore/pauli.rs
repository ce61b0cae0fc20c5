//! Pauli operators on N-qubit registers, built by bit arithmetic.
//!
//! Qubit `i` (1-based) acts on bit `N - i` of the basis index, so qubit 1 is
//! the most significant bit.

use crate::error::CoreError;
use crate::Result;
use alloc::vec::Vec;
use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub fn pauli_x() -> Matrix2<Complex64> {
    Matrix2::new(ZERO, ONE, ONE, ZERO)
}

pub fn pauli_y() -> Matrix2<Complex64> {
    Matrix2::new(ZERO, Complex64::new(0.0, -1.0), Complex64::new(0.0, 1.0), ZERO)
}

pub fn pauli_z() -> Matrix2<Complex64> {
    Matrix2::new(ONE, ZERO, ZERO, -ONE)
}

pub fn identity2() -> Matrix2<Complex64> {
    Matrix2::new(ONE, ZERO, ZERO, ONE)
}

fn check_index(n_qubits: usize, i: usize) -> Result<()> {
    if i == 0 || i > n_qubits {
        return Err(CoreError::QubitIndex { index: i, n_qubits });
    }
    Ok(())
}

/// Bit mask selecting qubit `i` in a basis index.
pub(crate) fn qubit_mask(n_qubits: usize, i: usize) -> usize {
    1 << (n_qubits - i)
}

/// `Z_i` on an N-qubit register.
pub fn z_op(n_qubits: usize, i: usize) -> Result<DMatrix<Complex64>> {
    check_index(n_qubits, i)?;
    let d = 1 << n_qubits;
    let mask = qubit_mask(n_qubits, i);
    let mut m = DMatrix::zeros(d, d);
    for b in 0..d {
        let sign = if b & mask == 0 { 1.0 } else { -1.0 };
        m[(b, b)] = Complex64::new(sign, 0.0);
    }
    Ok(m)
}

/// `X_i` on an N-qubit register.
pub fn x_op(n_qubits: usize, i: usize) -> Result<DMatrix<Complex64>> {
    check_index(n_qubits, i)?;
    let d = 1 << n_qubits;
    let mask = qubit_mask(n_qubits, i);
    let mut m = DMatrix::zeros(d, d);
    for b in 0..d {
        m[(b ^ mask, b)] = ONE;
    }
    Ok(m)
}

/// `X_i X_j` (i != j) on an N-qubit register.
pub fn xx_op(n_qubits: usize, i: usize, j: usize) -> Result<DMatrix<Complex64>> {
    check_index(n_qubits, i)?;
    check_index(n_qubits, j)?;
    if i == j {
        return Err(CoreError::Parameter("xx_op requires two distinct qubits"));
    }
    let d = 1 << n_qubits;
    let mask = qubit_mask(n_qubits, i) | qubit_mask(n_qubits, j);
    let mut m = DMatrix::zeros(d, d);
    for b in 0..d {
        m[(b ^ mask, b)] = ONE;
    }
    Ok(m)
}

/// All 4^N Pauli strings as dense matrices, ordered with qubit 1's letter
/// varying slowest; letter order (I, X, Y, Z). Intended for small-N
/// verification work, not for dynamics.
pub fn pauli_strings(n_qubits: usize) -> Vec<DMatrix<Complex64>> {
    let singles = [identity2(), pauli_x(), pauli_y(), pauli_z()];
    let mut out: Vec<DMatrix<Complex64>> = alloc::vec![DMatrix::identity(1, 1)];
    for _ in 0..n_qubits {
        let mut next = Vec::with_capacity(out.len() * 4);
        for m in &out {
            for s in &singles {
                next.push(m.kronecker(&DMatrix::from_iterator(2, 2, s.iter().cloned())));
            }
        }
        out = next;
    }
    out
}
