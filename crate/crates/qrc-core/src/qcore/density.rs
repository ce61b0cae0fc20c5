//! Density matrices: Hermitian, trace-one states of an N-qubit register.

use crate::error::CoreError;
use crate::math;
use crate::qcore::pauli::qubit_mask;
use crate::qcore::{HERMITICITY_TOL, TRACE_TOL};
use crate::Result;
use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

/// State of an N-qubit register. Construction validates Hermiticity and unit
/// trace; positivity is checked only by the explicit [`DensityMatrix::min_eigenvalue`]
/// path because it costs a full eigendecomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    data: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Maximally mixed state I / 2^N.
    pub fn maximally_mixed(n_qubits: usize) -> Result<Self> {
        check_qubit_count(n_qubits)?;
        let d = 1 << n_qubits;
        let p = Complex64::new(1.0 / d as f64, 0.0);
        Ok(DensityMatrix {
            n_qubits,
            data: DMatrix::from_diagonal_element(d, d, p),
        })
    }

    /// Pure state |psi><psi| from amplitudes (must be normalized).
    pub fn pure(n_qubits: usize, amplitudes: &[Complex64]) -> Result<Self> {
        check_qubit_count(n_qubits)?;
        let d = 1 << n_qubits;
        if amplitudes.len() != d {
            return Err(CoreError::DimensionMismatch {
                expected: d,
                actual: amplitudes.len(),
            });
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > TRACE_TOL {
            return Err(CoreError::Domain {
                what: "state norm",
                value: norm,
            });
        }
        let psi = DVector::from_column_slice(amplitudes);
        let data = &psi * psi.adjoint();
        Ok(DensityMatrix { n_qubits, data })
    }

    /// Basis state |b><b|.
    pub fn basis_state(n_qubits: usize, b: usize) -> Result<Self> {
        check_qubit_count(n_qubits)?;
        let d = 1 << n_qubits;
        if b >= d {
            return Err(CoreError::DimensionMismatch { expected: d, actual: b });
        }
        let mut data = DMatrix::zeros(d, d);
        data[(b, b)] = Complex64::new(1.0, 0.0);
        Ok(DensityMatrix { n_qubits, data })
    }

    /// Random product of single-qubit pure states, uniform on each Bloch
    /// sphere. Used for independent initial conditions across trials.
    pub fn random_product_state<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> Result<Self> {
        check_qubit_count(n_qubits)?;
        let mut amps: Vec<Complex64> = alloc::vec![Complex64::new(1.0, 0.0)];
        for _ in 0..n_qubits {
            let u: f64 = rng.random_range(0.0..1.0);
            let phi: f64 = rng.random_range(0.0..core::f64::consts::TAU);
            // cos(theta/2) with cos(theta) uniform in [-1, 1].
            let c = math::sqrt((1.0 + (1.0 - 2.0 * u)) / 2.0);
            let s = math::sqrt(1.0 - c * c);
            let a0 = Complex64::new(c, 0.0);
            let a1 = Complex64::from_polar(s, phi);
            let mut next = Vec::with_capacity(amps.len() * 2);
            for a in &amps {
                next.push(a * a0);
                next.push(a * a1);
            }
            amps = next;
        }
        Self::pure(n_qubits, &amps)
    }

    /// Wrap an existing matrix, validating Hermiticity and unit trace.
    pub fn from_matrix(n_qubits: usize, data: DMatrix<Complex64>) -> Result<Self> {
        check_qubit_count(n_qubits)?;
        let d = 1 << n_qubits;
        if data.nrows() != d || data.ncols() != d {
            return Err(CoreError::DimensionMismatch {
                expected: d,
                actual: data.nrows(),
            });
        }
        let rho = DensityMatrix { n_qubits, data };
        if rho.hermiticity_defect() > HERMITICITY_TOL {
            return Err(CoreError::Numerical {
                what: "density matrix",
                detail: "not Hermitian within tolerance",
            });
        }
        if rho.trace_defect() > TRACE_TOL {
            return Err(CoreError::Numerical {
                what: "density matrix",
                detail: "trace differs from one",
            });
        }
        Ok(rho)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.data
    }

    pub(crate) fn matrix_mut(&mut self) -> &mut DMatrix<Complex64> {
        &mut self.data
    }

    pub fn trace(&self) -> Complex64 {
        self.data.trace()
    }

    /// Tr[rho^2]; 1 for pure states, 2^-N for the maximally mixed state.
    /// Hermiticity reduces it to the squared Frobenius norm.
    pub fn purity(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    /// <Z_i> for qubit i (1-based), from the diagonal.
    pub fn expect_z(&self, i: usize) -> Result<f64> {
        if i == 0 || i > self.n_qubits {
            return Err(CoreError::QubitIndex {
                index: i,
                n_qubits: self.n_qubits,
            });
        }
        let mask = qubit_mask(self.n_qubits, i);
        let mut acc = 0.0;
        for b in 0..self.dim() {
            let p = self.data[(b, b)].re;
            acc += if b & mask == 0 { p } else { -p };
        }
        Ok(acc)
    }

    /// All <Z_i> in one diagonal pass; `out` has length N.
    pub fn expect_z_all(&self, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.n_qubits);
        out.fill(0.0);
        let n = self.n_qubits;
        for b in 0..self.dim() {
            let p = self.data[(b, b)].re;
            for (i, o) in out.iter_mut().enumerate() {
                let mask = 1 << (n - 1 - i);
                *o += if b & mask == 0 { p } else { -p };
            }
        }
    }

    /// Rescaled signal x' = (<Z_i> + 1) / 2 in [0, 1].
    pub fn signal(&self, i: usize) -> Result<f64> {
        Ok((self.expect_z(i)? + 1.0) / 2.0)
    }

    /// Re Tr[op rho] for a Hermitian observable; errors if the imaginary
    /// residue exceeds tolerance (the operator was not Hermitian).
    pub fn expect(&self, op: &DMatrix<Complex64>) -> Result<f64> {
        if op.nrows() != self.dim() || op.ncols() != self.dim() {
            return Err(CoreError::DimensionMismatch {
                expected: self.dim(),
                actual: op.nrows(),
            });
        }
        // Tr[op rho] = sum_{jk} op_{jk} rho_{kj}.
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..self.dim() {
            for k in 0..self.dim() {
                acc += op[(j, k)] * self.data[(k, j)];
            }
        }
        if acc.im.abs() > 1e-10 {
            return Err(CoreError::Numerical {
                what: "expectation value",
                detail: "imaginary residue above tolerance",
            });
        }
        Ok(acc.re)
    }

    /// Replace qubit 1 by |psi_s><psi_s| with psi_s = sqrt(1-s)|0> + sqrt(s)|1>,
    /// tensored with the partial trace over qubit 1. Idempotent in s.
    pub fn inject_input(&self, s: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&s) || !s.is_finite() {
            return Err(CoreError::Domain {
                what: "input amplitude s",
                value: s,
            });
        }
        let a = math::sqrt(1.0 - s);
        let b = math::sqrt(s);
        let d = self.dim();
        let half = d / 2;
        let mut out = DMatrix::zeros(d, d);
        if self.n_qubits == 1 {
            out[(0, 0)] = Complex64::new(a * a, 0.0);
            out[(0, 1)] = Complex64::new(a * b, 0.0);
            out[(1, 0)] = Complex64::new(a * b, 0.0);
            out[(1, 1)] = Complex64::new(b * b, 0.0);
        } else {
            // sigma = Tr_1[rho]; blocks of the result are (psi psi^dag)_{uv} sigma.
            for j in 0..half {
                for k in 0..half {
                    let sig = self.data[(j, k)] + self.data[(half + j, half + k)];
                    out[(j, k)] = sig * (a * a);
                    out[(j, half + k)] = sig * (a * b);
                    out[(half + j, k)] = sig * (a * b);
                    out[(half + j, half + k)] = sig * (b * b);
                }
            }
        }
        Ok(DensityMatrix {
            n_qubits: self.n_qubits,
            data: out,
        })
    }

    /// In-place form of [`DensityMatrix::inject_input`] for hot loops;
    /// `tmp` holds the reduced state and must be d/2 x d/2 (unused for N=1).
    pub(crate) fn inject_in_place(
        &mut self,
        s: f64,
        tmp: &mut DMatrix<Complex64>,
    ) -> Result<()> {
        if !(0.0..=1.0).contains(&s) || !s.is_finite() {
            return Err(CoreError::Domain {
                what: "input amplitude s",
                value: s,
            });
        }
        let a = math::sqrt(1.0 - s);
        let b = math::sqrt(s);
        if self.n_qubits == 1 {
            self.data[(0, 0)] = Complex64::new(a * a, 0.0);
            self.data[(0, 1)] = Complex64::new(a * b, 0.0);
            self.data[(1, 0)] = Complex64::new(a * b, 0.0);
            self.data[(1, 1)] = Complex64::new(b * b, 0.0);
            return Ok(());
        }
        let half = self.dim() / 2;
        debug_assert!(tmp.nrows() == half && tmp.ncols() == half);
        for k in 0..half {
            for j in 0..half {
                tmp[(j, k)] = self.data[(j, k)] + self.data[(half + j, half + k)];
            }
        }
        for k in 0..half {
            for j in 0..half {
                let sig = tmp[(j, k)];
                self.data[(j, k)] = sig * (a * a);
                self.data[(j, half + k)] = sig * (a * b);
                self.data[(half + j, k)] = sig * (a * b);
                self.data[(half + j, half + k)] = sig * (b * b);
            }
        }
        Ok(())
    }

    /// Reduced state after tracing out qubit 1.
    pub fn partial_trace_first(&self) -> Result<Self> {
        if self.n_qubits < 2 {
            return Err(CoreError::TooFewQubits {
                min: 2,
                actual: self.n_qubits,
            });
        }
        let half = self.dim() / 2;
        let mut out = DMatrix::zeros(half, half);
        for j in 0..half {
            for k in 0..half {
                out[(j, k)] = self.data[(j, k)] + self.data[(half + j, half + k)];
            }
        }
        Ok(DensityMatrix {
            n_qubits: self.n_qubits - 1,
            data: out,
        })
    }

    /// max |rho - rho^dag| elementwise.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for j in 0..self.dim() {
            for k in j..self.dim() {
                let diff = (self.data[(j, k)] - self.data[(k, j)].conj()).norm();
                worst = worst.max(diff);
            }
        }
        worst
    }

    /// |Tr rho - 1|.
    pub fn trace_defect(&self) -> f64 {
        (self.trace() - Complex64::new(1.0, 0.0)).norm()
    }

    /// Smallest eigenvalue; costs a full eigendecomposition, so this lives in
    /// test and validation paths only.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        let sym = self
            .data
            .clone()
            .try_symmetric_eigen(1e-13, 10_000)
            .ok_or(CoreError::Numerical {
                what: "state eigendecomposition",
                detail: "no convergence",
            })?;
        Ok(sym.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min))
    }
}

fn check_qubit_count(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 {
        return Err(CoreError::TooFewQubits { min: 1, actual: 0 });
    }
    if n_qubits > crate::qcore::hamiltonian::MAX_QUBITS {
        return Err(CoreError::TooManyQubits {
            n_qubits,
            max: crate::qcore::hamiltonian::MAX_QUBITS,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn maximally_mixed_has_expected_purity() {
        let rho = DensityMatrix::maximally_mixed(5).unwrap();
        assert_abs_diff_eq!(rho.purity(), 1.0 / 32.0, epsilon = 1e-12);
        assert_abs_diff_eq!(rho.trace().re, 1.0, epsilon = 1e-12);
        for i in 1..=5 {
            assert_abs_diff_eq!(rho.expect_z(i).unwrap(), 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!(rho.signal(i).unwrap(), 0.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn basis_state_signals_are_extremal() {
        let rho = DensityMatrix::basis_state(3, 0).unwrap();
        for i in 1..=3 {
            assert_abs_diff_eq!(rho.expect_z(i).unwrap(), 1.0, epsilon = 1e-15);
            assert_abs_diff_eq!(rho.signal(i).unwrap(), 1.0, epsilon = 1e-15);
        }
        // |01> on two qubits: qubit 1 up, qubit 2 down.
        let rho = DensityMatrix::basis_state(2, 0b01).unwrap();
        assert_abs_diff_eq!(rho.expect_z(1).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(rho.expect_z(2).unwrap(), -1.0, epsilon = 1e-15);
    }

    #[test]
    fn injection_prepares_the_first_qubit() {
        let rho = DensityMatrix::maximally_mixed(3).unwrap();
        let r0 = rho.inject_input(0.0).unwrap();
        assert_abs_diff_eq!(r0.expect_z(1).unwrap(), 1.0, epsilon = 1e-12);

        let rh = rho.inject_input(0.5).unwrap();
        assert_abs_diff_eq!(rh.expect_z(1).unwrap(), 0.0, epsilon = 1e-12);
        let x1 = crate::qcore::pauli::x_op(3, 1).unwrap();
        assert_abs_diff_eq!(rh.expect(&x1).unwrap(), 1.0, epsilon = 1e-12);

        // signal(1) = 1 - s after injection.
        for s in [0.0, 0.3, 0.77, 1.0] {
            let r = rho.inject_input(s).unwrap();
            assert_abs_diff_eq!(r.signal(1).unwrap(), 1.0 - s, epsilon = 1e-12);
            assert_abs_diff_eq!(r.trace_defect(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn injection_is_idempotent() {
        let mut rng = crate::seed::rng(3, &[99]);
        let rho = DensityMatrix::random_product_state(3, &mut rng).unwrap();
        let once = rho.inject_input(0.42).unwrap();
        let twice = once.inject_input(0.42).unwrap();
        let defect = (once.matrix() - twice.matrix())
            .iter()
            .map(|z| z.norm())
            .fold(0.0f64, f64::max);
        assert!(defect < 1e-12);
    }

    #[test]
    fn injection_rejects_out_of_range() {
        let rho = DensityMatrix::maximally_mixed(2).unwrap();
        assert!(rho.inject_input(-0.1).is_err());
        assert!(rho.inject_input(1.1).is_err());
        assert!(rho.inject_input(f64::NAN).is_err());
    }

    #[test]
    fn partial_trace_of_product_state_recovers_factor() {
        // rho_A (x) rho_B with rho_A pure |1>, rho_B maximally mixed on 2 qubits.
        let mut data = DMatrix::zeros(8, 8);
        for j in 0..4 {
            data[(4 + j, 4 + j)] = Complex64::new(0.25, 0.0);
        }
        let rho = DensityMatrix::from_matrix(3, data).unwrap();
        let reduced = rho.partial_trace_first().unwrap();
        let expect = DensityMatrix::maximally_mixed(2).unwrap();
        assert!(reduced
            .matrix()
            .iter()
            .zip(expect.matrix().iter())
            .all(|(a, b)| (a - b).norm() < 1e-12));
    }

    #[test]
    fn partial_trace_of_bell_state_is_maximally_mixed() {
        let inv = Complex64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let rho = DensityMatrix::pure(2, &[inv, zero, zero, inv]).unwrap();
        let reduced = rho.partial_trace_first().unwrap();
        assert_abs_diff_eq!(reduced.matrix()[(0, 0)].re, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(reduced.matrix()[(1, 1)].re, 0.5, epsilon = 1e-12);
        assert!(reduced.matrix()[(0, 1)].norm() < 1e-12);
    }

    #[test]
    fn partial_trace_requires_two_qubits() {
        let rho = DensityMatrix::maximally_mixed(1).unwrap();
        assert!(matches!(
            rho.partial_trace_first(),
            Err(CoreError::TooFewQubits { .. })
        ));
    }

    #[test]
    fn expect_z_all_matches_single_queries() {
        let mut rng = crate::seed::rng(8, &[1]);
        let rho = DensityMatrix::random_product_state(4, &mut rng).unwrap();
        let mut all = [0.0; 4];
        rho.expect_z_all(&mut all);
        for i in 1..=4 {
            assert_abs_diff_eq!(all[i - 1], rho.expect_z(i).unwrap(), epsilon = 1e-12);
        }
    }

    #[test]
    fn random_product_states_are_pure_and_valid() {
        let mut rng = crate::seed::rng(21, &[5]);
        for _ in 0..5 {
            let rho = DensityMatrix::random_product_state(3, &mut rng).unwrap();
            assert_abs_diff_eq!(rho.purity(), 1.0, epsilon = 1e-10);
            assert!(rho.trace_defect() < 1e-10);
            assert!(rho.hermiticity_defect() < 1e-10);
        }
    }
}
