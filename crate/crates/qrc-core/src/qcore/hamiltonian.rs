//! Transverse-field Ising Hamiltonians with random couplings:
//! H = sum_{i<j} J_ij X_i X_j + h sum_i Z_i, energies in units of the
//! magnetic field scale (set to 1).

use crate::error::CoreError;
use crate::qcore::pauli::qubit_mask;
use crate::Result;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

/// Largest register the dense representation accepts (16384^2 complex
/// entries at the limit).
pub const MAX_QUBITS: usize = 12;

/// Coupling topology of the X_i X_j terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Topology {
    /// Every pair coupled; disordered draws make the dynamics ergodic.
    FullyConnected,
    /// Chain couplings J_{i,i+1} only; integrable dynamics.
    OneDNearestNeighbour,
}

/// Hamiltonian with its stored couplings and assembled dense matrix.
/// Immutable after construction; safe to share across workers.
#[derive(Debug, Clone)]
pub struct Hamiltonian {
    n_qubits: usize,
    couplings: DMatrix<f64>,
    field: f64,
    topology: Topology,
    matrix: DMatrix<Complex64>,
}

/// Draw couplings uniformly from [-J/2, J/2] on the pairs selected by
/// `topology` and assemble the dense matrix. Deterministic given the RNG
/// stream: pairs are visited in (i, j) lexicographic order, i < j.
pub fn build_hamiltonian<R: Rng + ?Sized>(
    n_qubits: usize,
    j: f64,
    h: f64,
    topology: Topology,
    rng: &mut R,
) -> Result<Hamiltonian> {
    if n_qubits == 0 {
        return Err(CoreError::TooFewQubits { min: 1, actual: 0 });
    }
    if n_qubits > MAX_QUBITS {
        return Err(CoreError::TooManyQubits {
            n_qubits,
            max: MAX_QUBITS,
        });
    }
    if !(j >= 0.0) || !j.is_finite() {
        return Err(CoreError::Domain {
            what: "coupling scale J",
            value: j,
        });
    }
    if !h.is_finite() {
        return Err(CoreError::Domain {
            what: "field h",
            value: h,
        });
    }
    let half = j / 2.0;
    let mut couplings = DMatrix::zeros(n_qubits, n_qubits);
    for a in 1..n_qubits {
        for b in (a + 1)..=n_qubits {
            let coupled = match topology {
                Topology::FullyConnected => true,
                Topology::OneDNearestNeighbour => b == a + 1,
            };
            if coupled {
                let value = if half > 0.0 {
                    rng.random_range(-half..=half)
                } else {
                    0.0
                };
                couplings[(a - 1, b - 1)] = value;
                couplings[(b - 1, a - 1)] = value;
            }
        }
    }
    Hamiltonian::from_couplings(n_qubits, couplings, h, topology)
}

impl Hamiltonian {
    /// Assemble from explicit couplings (symmetric, zero diagonal).
    pub fn from_couplings(
        n_qubits: usize,
        couplings: DMatrix<f64>,
        field: f64,
        topology: Topology,
    ) -> Result<Self> {
        if couplings.nrows() != n_qubits || couplings.ncols() != n_qubits {
            return Err(CoreError::DimensionMismatch {
                expected: n_qubits,
                actual: couplings.nrows(),
            });
        }
        let matrix = assemble(n_qubits, &couplings, field);
        Ok(Hamiltonian {
            n_qubits,
            couplings,
            field,
            topology,
            matrix,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn couplings(&self) -> &DMatrix<f64> {
        &self.couplings
    }

    pub fn field(&self) -> f64 {
        self.field
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// max |H - rebuild(couplings, field)|: nonzero only if the stored matrix
    /// was corrupted.
    pub fn reconstruction_defect(&self) -> f64 {
        let rebuilt = assemble(self.n_qubits, &self.couplings, self.field);
        (&self.matrix - rebuilt)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Hermitian eigendecomposition (eigenvalues real). One decomposition
    /// serves every propagator duration derived from this Hamiltonian.
    pub fn eigendecomposition(&self) -> Result<(DVector<f64>, DMatrix<Complex64>)> {
        let eig = self
            .matrix
            .clone()
            .try_symmetric_eigen(1e-13, 50_000)
            .ok_or(CoreError::Numerical {
                what: "Hamiltonian eigendecomposition",
                detail: "no convergence",
            })?;
        Ok((eig.eigenvalues, eig.eigenvectors))
    }
}

fn assemble(n_qubits: usize, couplings: &DMatrix<f64>, field: f64) -> DMatrix<Complex64> {
    let d = 1 << n_qubits;
    let mut m = DMatrix::zeros(d, d);
    // Z terms: diagonal, +1 for bit 0, -1 for bit 1.
    for b in 0..d {
        let mut diag = 0.0;
        for i in 1..=n_qubits {
            diag += if b & qubit_mask(n_qubits, i) == 0 {
                field
            } else {
                -field
            };
        }
        m[(b, b)] = Complex64::new(diag, 0.0);
    }
    // X_i X_j terms: basis-index bit flips.
    for a in 1..n_qubits {
        for bq in (a + 1)..=n_qubits {
            let j_ab = couplings[(a - 1, bq - 1)];
            if j_ab == 0.0 {
                continue;
            }
            let mask = qubit_mask(n_qubits, a) | qubit_mask(n_qubits, bq);
            for b in 0..d {
                m[(b ^ mask, b)] += Complex64::new(j_ab, 0.0);
            }
        }
    }
    m
}
