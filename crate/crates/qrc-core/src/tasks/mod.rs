//! Benchmark streams and analysis: timer, NARMA, Mackey-Glass, binary
//! memory/parity targets, capacity curves, and Lyapunov estimation.

mod binary;
mod capacity;
mod lyapunov;
mod mackey_glass;
mod narma;
mod timer;

pub use binary::{pc_target, random_binary_inputs, stm_target, BINARY_PHASES};
pub use capacity::{
    aggregate_curves, capacity_curve, capacity_curve_sample, capacity_from_blocks,
    capacity_from_signals, capacity_pair_sample, run_binary_drive, sample_std, BinaryTask,
    CapacityCurve, SampleCapacities, CAPACITY_SAMPLES, TAU_B_MAX,
};
pub use lyapunov::{lyapunov_estimate, LYAPUNOV_HORIZON, LYAPUNOV_WINDOW};
pub use mackey_glass::{
    mackey_glass_stream, mg_fine_step, MG_DEFAULT_TOTAL, MG_EVAL_STEPS, MG_FINE_STEP,
    MG_SUBSAMPLE, MG_TRAIN_STEPS, MG_WASHOUT_FINE,
};
pub use narma::{
    narma2_step, narma_n_step, narma_sequence, narma_suite_stream, sine_input, NarmaInput,
    NARMA_ORDERS, NARMA_PHASES,
};
pub use timer::{timer_stream, timer_target, TIMER_CUE, TIMER_DISCARD, TIMER_TOTAL};

use crate::error::CoreError;
use crate::readout::{self, EvalReport};
use crate::reservoir::Phases;
use crate::Result;
use alloc::string::String;
use alloc::vec::Vec;
use nalgebra::DMatrix;

/// One named target sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetSeries {
    pub name: String,
    pub values: Vec<f64>,
}

/// Input stream plus one or more aligned targets. `inputs` holds the values
/// injected into the reservoir (already in [0,1]); `raw_inputs` the
/// pre-rescaling values that drive target recursions and baselines. Target
/// index k pairs with the signals recorded after consuming input k.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskStream {
    pub name: String,
    pub inputs: Vec<f64>,
    pub raw_inputs: Vec<f64>,
    pub targets: Vec<TargetSeries>,
    pub phases: Phases,
    /// Task parameters and scaling constants, name/value pairs.
    pub params: Vec<(String, f64)>,
}

impl TaskStream {
    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn target(&self, name: &str) -> Option<&TargetSeries> {
        self.targets.iter().find(|t| t.name == name)
    }

    pub fn validate(&self) -> Result<()> {
        if self.inputs.len() != self.raw_inputs.len() {
            return Err(CoreError::LengthMismatch {
                what: "raw input sequence",
                expected: self.inputs.len(),
                actual: self.raw_inputs.len(),
            });
        }
        if self.phases.total() != self.inputs.len() {
            return Err(CoreError::LengthMismatch {
                what: "phase lengths",
                expected: self.inputs.len(),
                actual: self.phases.total(),
            });
        }
        for &s in &self.inputs {
            if !(0.0..=1.0).contains(&s) {
                return Err(CoreError::Domain {
                    what: "stream input",
                    value: s,
                });
            }
        }
        for t in &self.targets {
            if t.values.len() != self.inputs.len() {
                return Err(CoreError::LengthMismatch {
                    what: "target sequence",
                    expected: self.inputs.len(),
                    actual: t.values.len(),
                });
            }
        }
        Ok(())
    }
}

/// Two-parameter baseline: fit target_k = w1 raw_k + w0 on the training
/// phase, report NMSE (and capacity) on the evaluation phase.
pub fn linear_regression_baseline(stream: &TaskStream, target_index: usize) -> Result<EvalReport> {
    stream.validate()?;
    let target = stream
        .targets
        .get(target_index)
        .ok_or(CoreError::Parameter("target index out of range"))?;
    let tr = stream.phases.train_range();
    let ev = stream.phases.eval_range();
    let x_train = DMatrix::from_fn(tr.len(), 2, |r, c| {
        if c == 0 {
            1.0
        } else {
            stream.raw_inputs[tr.start + r]
        }
    });
    let w = readout::train(&x_train, &target.values[tr.clone()])?;
    let x_eval = DMatrix::from_fn(ev.len(), 2, |r, c| {
        if c == 0 {
            1.0
        } else {
            stream.raw_inputs[ev.start + r]
        }
    });
    let outputs = readout::predict(&x_eval, &w)?;
    EvalReport::new(outputs, target.values[ev].to_vec())
}
