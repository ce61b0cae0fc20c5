//! Unitary propagators U = exp(-i H dt) from a cached eigendecomposition.

use crate::error::CoreError;
use crate::linalg::{self, ConjScratch, SplitUnitary};
use crate::qcore::density::DensityMatrix;
use crate::qcore::hamiltonian::Hamiltonian;
use crate::qcore::UNITARITY_TOL;
use crate::Result;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// exp(-i H dt) plus the eigendecomposition it was reassembled from, so
/// further durations cost one phase reassembly instead of a fresh
/// diagonalization.
pub struct Propagator {
    dt: f64,
    matrix: DMatrix<Complex64>,
    eigvals: DVector<f64>,
    eigvecs: DMatrix<Complex64>,
    split: SplitUnitary,
}

/// Build a propagator for duration `dt` (one-time eigendecomposition of H).
pub fn propagator(h: &Hamiltonian, dt: f64) -> Result<Propagator> {
    if !(dt >= 0.0) || !dt.is_finite() {
        return Err(CoreError::Domain {
            what: "propagator duration",
            value: dt,
        });
    }
    let (vals, vecs) = h.eigendecomposition()?;
    Ok(Propagator::from_eigen(vals, vecs, dt))
}

impl Propagator {
    fn from_eigen(eigvals: DVector<f64>, eigvecs: DMatrix<Complex64>, dt: f64) -> Self {
        // U = V diag(e^{-i lambda dt}) V^dag.
        let mut scaled = eigvecs.clone();
        for (k, lambda) in eigvals.iter().enumerate() {
            let phase = Complex64::from_polar(1.0, -lambda * dt);
            scaled.column_mut(k).iter_mut().for_each(|z| *z *= phase);
        }
        let matrix = linalg::mul_adjoint_rhs(&scaled, &eigvecs);
        let split = SplitUnitary::new(&matrix);
        Propagator {
            dt,
            matrix,
            eigvals,
            eigvecs,
            split,
        }
    }

    /// Propagator for a different duration, reusing the eigendecomposition.
    pub fn at(&self, dt: f64) -> Result<Propagator> {
        if !(dt >= 0.0) || !dt.is_finite() {
            return Err(CoreError::Domain {
                what: "propagator duration",
                value: dt,
            });
        }
        Ok(Propagator::from_eigen(
            self.eigvals.clone(),
            self.eigvecs.clone(),
            dt,
        ))
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// max |U U^dag - I|.
    pub fn unitarity_defect(&self) -> f64 {
        unitarity_defect(&self.matrix)
    }

    /// rho' = U rho U^dag, allocating scratch. Hot loops should hold a
    /// [`ConjScratch`] and use [`Propagator::evolve_in_place`].
    pub fn evolve(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.dim() {
            return Err(CoreError::DimensionMismatch {
                expected: self.dim(),
                actual: rho.dim(),
            });
        }
        let mut out = rho.clone();
        let mut scratch = ConjScratch::new(self.dim());
        linalg::conjugate(&self.split, out.matrix_mut(), &mut scratch);
        Ok(out)
    }

    pub(crate) fn evolve_in_place(&self, rho: &mut DensityMatrix, scratch: &mut ConjScratch) {
        debug_assert_eq!(rho.dim(), self.dim());
        linalg::conjugate(&self.split, rho.matrix_mut(), scratch);
    }

    pub(crate) fn split(&self) -> &SplitUnitary {
        &self.split
    }
}

/// rho' = U rho U^dag (spec-level name for [`Propagator::evolve`]).
pub fn evolve(rho: &DensityMatrix, u: &Propagator) -> Result<DensityMatrix> {
    u.evolve(rho)
}

/// Conjugate by an arbitrary unitary, validating unitarity first. Used for
/// circuit identities rather than time evolution.
pub fn apply_unitary(rho: &DensityMatrix, u: &DMatrix<Complex64>) -> Result<DensityMatrix> {
    if u.nrows() != rho.dim() || u.ncols() != rho.dim() {
        return Err(CoreError::DimensionMismatch {
            expected: rho.dim(),
            actual: u.nrows(),
        });
    }
    let defect = unitarity_defect(u);
    if defect > UNITARITY_TOL {
        return Err(CoreError::NotUnitary { defect });
    }
    let split = SplitUnitary::new(u);
    let mut out = rho.clone();
    let mut scratch = ConjScratch::new(rho.dim());
    linalg::conjugate(&split, out.matrix_mut(), &mut scratch);
    Ok(out)
}

fn unitarity_defect(u: &DMatrix<Complex64>) -> f64 {
    let prod = linalg::mul_adjoint_rhs(u, u);
    let d = u.nrows();
    let mut worst = 0.0f64;
    for j in 0..d {
        for k in 0..d {
            let expect = if j == k { 1.0 } else { 0.0 };
            worst = worst.max((prod[(j, k)] - Complex64::new(expect, 0.0)).norm());
        }
    }
    worst
}
