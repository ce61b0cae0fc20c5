//! Exact finite-dimensional quantum states, Hamiltonians, propagators,
//! channels, and observables for small qubit registers.
//!
//! Conventions used throughout:
//! - Qubits are numbered 1..=N; qubit 1 is the most significant bit of the
//!   computational-basis index, so the input qubit occupies the top-level
//!   2x2 block structure of the density matrix.
//! - All matrices are dense `nalgebra` types over `Complex64`.

pub mod channel;
pub mod density;
pub mod hamiltonian;
pub mod pauli;
pub mod propagator;

/// Elementwise tolerance for Hermiticity of a state.
pub const HERMITICITY_TOL: f64 = 1e-10;
/// Tolerance for |Tr rho - 1|.
pub const TRACE_TOL: f64 = 1e-10;
/// Most negative admissible eigenvalue of a state (test/debug checks only).
pub const POSITIVITY_TOL: f64 = -1e-9;
/// Tolerance for max |U U^dag - I| of propagators and custom unitaries.
pub const UNITARITY_TOL: f64 = 1e-9;
