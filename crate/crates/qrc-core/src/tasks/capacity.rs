//! Memory and parity capacity curves: per-delay squared correlations of a
//! trained readout, summed with the floor at the largest delay subtracted.

use super::binary::{pc_target, random_binary_inputs, stm_target};
use crate::math;
use crate::readout::{capacity_single, capacity_sum, predict_batch, DesignFactor};
use crate::reservoir::{ReservoirConfig, ReservoirSystem, SignalMatrix};
use crate::seed::{self, tags};
use crate::Result;
use alloc::vec::Vec;
use nalgebra::DMatrix;

/// Largest probed delay.
pub const TAU_B_MAX: usize = 500;
/// Reservoir draws per configuration cell.
pub const CAPACITY_SAMPLES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryTask {
    Stm,
    Pc,
}

impl BinaryTask {
    pub fn target(self, s: &[f64], tau_b: usize) -> Vec<f64> {
        match self {
            BinaryTask::Stm => stm_target(s, tau_b),
            BinaryTask::Pc => pc_target(s, tau_b),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BinaryTask::Stm => "stm",
            BinaryTask::Pc => "pc",
        }
    }
}

/// Capacity curve of one reservoir draw.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleCapacities {
    /// C(tau_b) for tau_b = 0..=tau_b_max, evaluated on the eval phase.
    pub per_delay: Vec<f64>,
    /// Sum over delays after subtracting the floor C(tau_b_max).
    pub capacity: f64,
}

/// Score precomputed train/eval design blocks on the given task families over
/// delays 0..=tau_b_max, sharing one factorization. `train_range` /
/// `eval_range` locate the block rows within `inputs`.
pub fn capacity_from_blocks(
    train_block: &DMatrix<f64>,
    eval_block: &DMatrix<f64>,
    inputs: &[f64],
    train_range: core::ops::Range<usize>,
    eval_range: core::ops::Range<usize>,
    tasks: &[BinaryTask],
    tau_b_max: usize,
) -> Result<Vec<SampleCapacities>> {
    if inputs.len() < eval_range.end {
        return Err(crate::error::CoreError::LengthMismatch {
            what: "capacity input sequence",
            expected: eval_range.end,
            actual: inputs.len(),
        });
    }
    let factor = DesignFactor::new(train_block)?;
    let mut out = Vec::with_capacity(tasks.len());
    for task in tasks {
        let mut train_targets = DMatrix::zeros(train_range.len(), tau_b_max + 1);
        let mut eval_targets = DMatrix::zeros(eval_range.len(), tau_b_max + 1);
        for tau in 0..=tau_b_max {
            let full = task.target(inputs, tau);
            for (r, k) in train_range.clone().enumerate() {
                train_targets[(r, tau)] = full[k];
            }
            for (r, k) in eval_range.clone().enumerate() {
                eval_targets[(r, tau)] = full[k];
            }
        }
        let batch = factor.solve_batch(&train_targets)?;
        let predictions = predict_batch(eval_block, &batch)?;
        let mut per_delay = Vec::with_capacity(tau_b_max + 1);
        for tau in 0..=tau_b_max {
            let outputs: Vec<f64> = predictions.column(tau).iter().cloned().collect();
            let targets: Vec<f64> = eval_targets.column(tau).iter().cloned().collect();
            per_delay.push(capacity_single(&outputs, &targets)?);
        }
        let capacity = capacity_sum(&per_delay, tau_b_max)?;
        out.push(SampleCapacities {
            per_delay,
            capacity,
        });
    }
    Ok(out)
}

/// Score an assembled signal matrix, one result per task.
pub fn capacity_from_signals(
    matrix: &SignalMatrix,
    inputs: &[f64],
    tasks: &[BinaryTask],
    tau_b_max: usize,
) -> Result<Vec<SampleCapacities>> {
    let phases = matrix.phases();
    capacity_from_blocks(
        &matrix.train_block(),
        &matrix.eval_block(),
        inputs,
        phases.train_range(),
        phases.eval_range(),
        tasks,
        tau_b_max,
    )
}

/// Draw a reservoir from `config` and drive it with its seeded binary input
/// stream, returning the signal matrix and the inputs.
pub fn run_binary_drive(config: &ReservoirConfig) -> Result<(SignalMatrix, Vec<f64>)> {
    let system = ReservoirSystem::new(config.clone())?;
    let mut input_rng = seed::rng(config.seed, &[tags::INPUT]);
    let inputs = random_binary_inputs(config.phases().total(), &mut input_rng);
    let matrix = system.run(&inputs)?;
    Ok((matrix, inputs))
}

/// One reservoir run per sample; every delay shares the run and its design
/// factorization. All randomness derives from `config.seed`.
pub fn capacity_curve_sample(
    config: &ReservoirConfig,
    task: BinaryTask,
    tau_b_max: usize,
) -> Result<SampleCapacities> {
    let (matrix, inputs) = run_binary_drive(config)?;
    let mut scored = capacity_from_signals(&matrix, &inputs, &[task], tau_b_max)?;
    Ok(scored.pop().expect("one task scored"))
}

/// Memory and parity capacities of one reservoir draw, sharing the run and
/// its factorization between the two target families.
pub fn capacity_pair_sample(
    config: &ReservoirConfig,
    tau_b_max: usize,
) -> Result<(SampleCapacities, SampleCapacities)> {
    let (matrix, inputs) = run_binary_drive(config)?;
    let mut scored = capacity_from_signals(
        &matrix,
        &inputs,
        &[BinaryTask::Stm, BinaryTask::Pc],
        tau_b_max,
    )?;
    let pc = scored.pop().expect("parity scored");
    let stm = scored.pop().expect("memory scored");
    Ok((stm, pc))
}

/// Curve statistics over independent reservoir draws.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacityCurve {
    pub per_delay_mean: Vec<f64>,
    pub per_delay_std: Vec<f64>,
    pub per_sample: Vec<f64>,
    pub capacity_mean: f64,
    pub capacity_std: f64,
}

/// Sample standard deviation (n - 1 denominator; 0 for a single sample).
pub fn sample_std(values: &[f64], mean: f64) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    math::sqrt(ss / (values.len() - 1) as f64)
}

/// Run `samples` independent draws of `template` (seed replaced per sample
/// from `master_seed`) and aggregate.
pub fn capacity_curve(
    template: &ReservoirConfig,
    task: BinaryTask,
    tau_b_max: usize,
    samples: usize,
    master_seed: u64,
) -> Result<CapacityCurve> {
    let results: Vec<SampleCapacities> = (0..samples)
        .map(|i| {
            let mut config = template.clone();
            config.seed = seed::child_seed(master_seed, &[tags::SAMPLE, i as u64]);
            capacity_curve_sample(&config, task, tau_b_max)
        })
        .collect::<Result<_>>()?;
    Ok(aggregate_curves(&results, tau_b_max))
}

/// Combine per-sample curves into mean/std statistics.
pub fn aggregate_curves(results: &[SampleCapacities], tau_b_max: usize) -> CapacityCurve {
    let n = results.len().max(1) as f64;
    let mut per_delay_mean = alloc::vec![0.0; tau_b_max + 1];
    for r in results {
        for (m, c) in per_delay_mean.iter_mut().zip(&r.per_delay) {
            *m += c;
        }
    }
    for m in per_delay_mean.iter_mut() {
        *m /= n;
    }
    let per_delay_std: Vec<f64> = (0..=tau_b_max)
        .map(|tau| {
            let col: Vec<f64> = results.iter().map(|r| r.per_delay[tau]).collect();
            sample_std(&col, per_delay_mean[tau])
        })
        .collect();
    let per_sample: Vec<f64> = results.iter().map(|r| r.capacity).collect();
    let capacity_mean = per_sample.iter().sum::<f64>() / n;
    let capacity_std = sample_std(&per_sample, capacity_mean);
    CapacityCurve {
        per_delay_mean,
        per_delay_std,
        per_sample,
        capacity_mean,
        capacity_std,
    }
}
