use thiserror::Error;

/// Errors shared by all modules.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoreError {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("{n_qubits} qubits exceeds the configured maximum of {max}")]
    TooManyQubits { n_qubits: usize, max: usize },

    #[error("operation requires at least {min} qubits, got {actual}")]
    TooFewQubits { min: usize, actual: usize },

    #[error("qubit index {index} out of range 1..={n_qubits}")]
    QubitIndex { index: usize, n_qubits: usize },

    #[error("{what} out of domain: {value}")]
    Domain { what: &'static str, value: f64 },

    #[error("invalid parameter: {0}")]
    Parameter(&'static str),

    #[error("numerical failure in {what}: {detail}")]
    Numerical { what: &'static str, detail: &'static str },

    #[error("matrix is not unitary: defect {defect:e}")]
    NotUnitary { defect: f64 },

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("underdetermined system: {rows} rows < {cols} columns")]
    Underdetermined { rows: usize, cols: usize },

    #[error("undefined measure: {0}")]
    UndefinedMeasure(&'static str),

    #[error("closed-loop output diverged at step {step} (|y| = {magnitude:.3})")]
    Diverged { step: usize, magnitude: f64 },

    #[error("length mismatch: {what} has length {actual}, need {expected}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },
}
