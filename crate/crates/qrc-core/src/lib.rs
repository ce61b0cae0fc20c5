//! Quantum reservoir computing on exactly simulated spin systems.
//!
//! The crate simulates small disordered transverse-field Ising systems as
//! reservoirs: inputs are injected into the first qubit as a CPTP replacement
//! map, the system evolves unitarily (optionally with per-qubit dephasing),
//! and single-qubit `Z` signals are sampled at `V` sub-intervals of each input
//! period ("virtual nodes"). A linear readout trained by least squares turns
//! the sampled signals into task outputs.
//!
//! Modules:
//! - [`qcore`]: density matrices, Hamiltonians, propagators, channels.
//! - [`reservoir`]: driving a system with an input sequence and assembling
//!   the design matrix of multiplexed signals.
//! - [`readout`]: least-squares training, prediction, NMSE and capacity
//!   metrics, teacher-forced and closed-loop generation.
//! - [`tasks`]: benchmark streams (timer, NARMA, Mackey-Glass, delay/parity)
//!   and the Lyapunov-exponent estimator.
//! - [`esn`]: an echo-state-network baseline sharing the readout pipeline.
//! - [`seed`]: deterministic derivation of per-run RNG streams.
//!
//! `no_std` compatible (requires `alloc`); the default `std` feature only
//! enables runtime SIMD selection in the dense kernels.

#![cfg_attr(not(any(feature = "std", test)), no_std)]

extern crate alloc;

pub mod error;
pub mod esn;
pub(crate) mod linalg;
pub(crate) mod math;
pub mod qcore;
pub mod readout;
pub mod reservoir;
pub mod seed;
pub mod tasks;

pub use error::CoreError;
pub use qcore::channel::{dephase, DephasingAxis, NoiseSpec};
pub use qcore::density::DensityMatrix;
pub use qcore::hamiltonian::{build_hamiltonian, Hamiltonian, Topology};
pub use qcore::propagator::{apply_unitary, evolve, propagator, Propagator};
pub use readout::{
    capacity_single, capacity_sum, nmse, predict, train, DesignFactor, EvalReport, ReadoutWeights,
};
pub use reservoir::{init_state, Phases, ReservoirConfig, ReservoirState, ReservoirSystem, SignalMatrix};
pub use tasks::TaskStream;

/// Result alias used throughout the crate.
pub type Result<T> = core::result::Result<T, CoreError>;
