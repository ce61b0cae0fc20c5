//! Echo state network baseline: tanh nodes, uniform random weights rescaled
//! to a target spectral radius, trained through the same readout pipeline as
//! the quantum reservoir.

use crate::error::CoreError;
use crate::math;
use crate::reservoir::Phases;
use crate::seed::{self, tags};
use crate::tasks::{
    aggregate_curves, capacity_from_blocks, random_binary_inputs, BinaryTask, CapacityCurve,
    SampleCapacities, BINARY_PHASES,
};
use crate::Result;
use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};
use rand::Rng;

/// How binary input symbols enter the activation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputCase {
    /// Symbol 0 is injected as -1 (symmetric drive).
    CaseI,
    /// Symbols enter as-is.
    CaseII,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EsnSystem {
    pub n_nodes: usize,
    /// Internal weights, rescaled to the target spectral radius.
    pub internal: DMatrix<f64>,
    pub input: DVector<f64>,
    pub spectral_radius_target: f64,
    pub input_case: InputCase,
}

/// Largest eigenvalue magnitude.
fn spectral_radius(m: &DMatrix<f64>) -> f64 {
    m.complex_eigenvalues()
        .iter()
        .map(|z| math::sqrt(z.norm_sqr()))
        .fold(0.0, f64::max)
}

/// Draw weights uniformly from [-1, 1] and rescale the internal matrix so
/// its spectral radius equals the target. A zero-radius draw is redrawn.
pub fn esn_build(
    n_nodes: usize,
    spectral_radius_target: f64,
    input_case: InputCase,
    seed: u64,
) -> Result<EsnSystem> {
    if n_nodes == 0 {
        return Err(CoreError::Parameter("need at least one node"));
    }
    if !(spectral_radius_target > 0.0) || !spectral_radius_target.is_finite() {
        return Err(CoreError::Domain {
            what: "spectral radius",
            value: spectral_radius_target,
        });
    }
    for attempt in 0..8u64 {
        let mut rng = seed::rng(seed, &[tags::ESN, attempt]);
        let mut internal =
            DMatrix::from_fn(n_nodes, n_nodes, |_, _| rng.random_range(-1.0..=1.0));
        let input = DVector::from_fn(n_nodes, |_, _| rng.random_range(-1.0..=1.0));
        let radius = spectral_radius(&internal);
        if radius == 0.0 {
            continue;
        }
        internal *= spectral_radius_target / radius;
        return Ok(EsnSystem {
            n_nodes,
            internal,
            input,
            spectral_radius_target,
            input_case,
        });
    }
    Err(CoreError::Numerical {
        what: "internal weight draw",
        detail: "spectral radius vanished on every attempt",
    })
}

impl EsnSystem {
    fn effective_input(&self, s: f64) -> f64 {
        match self.input_case {
            InputCase::CaseI => {
                if s == 0.0 {
                    -1.0
                } else {
                    s
                }
            }
            InputCase::CaseII => s,
        }
    }

    /// Verified radius of the stored internal matrix.
    pub fn spectral_radius(&self) -> f64 {
        spectral_radius(&self.internal)
    }
}

/// One update x' = tanh(W x + w_in s).
pub fn esn_step(state: &mut DVector<f64>, s: f64, system: &EsnSystem) -> Result<()> {
    if state.nrows() != system.n_nodes {
        return Err(CoreError::DimensionMismatch {
            expected: system.n_nodes,
            actual: state.nrows(),
        });
    }
    let s_eff = system.effective_input(s);
    let mut next = &system.internal * &*state;
    next.axpy(s_eff, &system.input, 1.0);
    next.apply(|v| *v = math::tanh(*v));
    *state = next;
    Ok(())
}

/// Drive from the zero state and record every post-step state as a design
/// matrix row (bias column first).
pub fn esn_run(system: &EsnSystem, inputs: &[f64]) -> Result<DMatrix<f64>> {
    let mut state = DVector::zeros(system.n_nodes);
    let mut design = DMatrix::zeros(inputs.len(), system.n_nodes + 1);
    for (k, &s) in inputs.iter().enumerate() {
        esn_step(&mut state, s, system)?;
        design[(k, 0)] = 1.0;
        for i in 0..system.n_nodes {
            design[(k, 1 + i)] = state[i];
        }
    }
    Ok(design)
}

/// Memory and parity capacities of one network draw on one input stream;
/// the run and its factorization are shared between the two target families.
pub fn esn_capacity_sample(
    n_nodes: usize,
    radius: f64,
    input_case: InputCase,
    seed: u64,
    tau_b_max: usize,
    phases: Phases,
) -> Result<(SampleCapacities, SampleCapacities)> {
    let system = esn_build(n_nodes, radius, input_case, seed)?;
    let mut input_rng = seed::rng(seed, &[tags::INPUT]);
    let inputs = random_binary_inputs(phases.total(), &mut input_rng);
    let design = esn_run(&system, &inputs)?;
    let tr = phases.train_range();
    let ev = phases.eval_range();
    let mut scored = capacity_from_blocks(
        &design.rows(tr.start, tr.len()).into_owned(),
        &design.rows(ev.start, ev.len()).into_owned(),
        &inputs,
        tr,
        ev,
        &[BinaryTask::Stm, BinaryTask::Pc],
        tau_b_max,
    )?;
    let pc = scored.pop().expect("parity scored");
    let stm = scored.pop().expect("memory scored");
    Ok((stm, pc))
}

/// Capacity statistics of one radius setting.
#[derive(Debug, Clone, PartialEq)]
pub struct EsnRadiusResult {
    pub radius: f64,
    pub stm: CapacityCurve,
    pub pc: CapacityCurve,
    /// Per-sample C_STM + C_PC.
    pub total_per_sample: Vec<f64>,
    pub total_mean: f64,
    pub total_std: f64,
}

/// Reference radius grid 0.05, 0.15, ..., 1.95.
pub fn default_radius_grid() -> Vec<f64> {
    (0..20).map(|i| 0.05 + 0.1 * i as f64).collect()
}

/// Sweep the radius grid with `samples` independent draws per radius.
pub fn esn_benchmark(
    n_nodes: usize,
    radius_grid: &[f64],
    input_case: InputCase,
    samples: usize,
    master_seed: u64,
    tau_b_max: usize,
) -> Result<Vec<EsnRadiusResult>> {
    if radius_grid.is_empty() || samples == 0 {
        return Err(CoreError::Parameter("empty radius grid or zero samples"));
    }
    let mut results = Vec::with_capacity(radius_grid.len());
    for (r_idx, &radius) in radius_grid.iter().enumerate() {
        let mut stm_samples = Vec::with_capacity(samples);
        let mut pc_samples = Vec::with_capacity(samples);
        for s_idx in 0..samples {
            let seed = seed::child_seed(master_seed, &[tags::SAMPLE, r_idx as u64, s_idx as u64]);
            let (stm, pc) = esn_capacity_sample(
                n_nodes,
                radius,
                input_case,
                seed,
                tau_b_max,
                BINARY_PHASES,
            )?;
            stm_samples.push(stm);
            pc_samples.push(pc);
        }
        results.push(radius_result(radius, stm_samples, pc_samples, tau_b_max));
    }
    Ok(results)
}

/// Aggregate one radius cell from its per-sample curves.
pub fn radius_result(
    radius: f64,
    stm_samples: Vec<SampleCapacities>,
    pc_samples: Vec<SampleCapacities>,
    tau_b_max: usize,
) -> EsnRadiusResult {
    let total_per_sample: Vec<f64> = stm_samples
        .iter()
        .zip(&pc_samples)
        .map(|(a, b)| a.capacity + b.capacity)
        .collect();
    let n = total_per_sample.len().max(1) as f64;
    let total_mean = total_per_sample.iter().sum::<f64>() / n;
    let total_std = crate::tasks::sample_std(&total_per_sample, total_mean);
    EsnRadiusResult {
        radius,
        stm: aggregate_curves(&stm_samples, tau_b_max),
        pc: aggregate_curves(&pc_samples, tau_b_max),
        total_per_sample,
        total_mean,
        total_std,
    }
}

/// Index of the radius with the largest mean total capacity.
pub fn best_radius_index(results: &[EsnRadiusResult]) -> usize {
    let mut best = 0;
    for (i, r) in results.iter().enumerate() {
        if r.total_mean > results[best].total_mean {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn single_node_radius_is_the_weight_magnitude() {
        let sys = esn_build(1, 0.5, InputCase::CaseII, 3).unwrap();
        assert_abs_diff_eq!(math::abs(sys.internal[(0, 0)]), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn rescaled_radius_hits_the_target() {
        for (n, target) in [(5, 0.05), (30, 0.9), (50, 1.95)] {
            let sys = esn_build(n, target, InputCase::CaseI, 17).unwrap();
            assert_abs_diff_eq!(sys.spectral_radius(), target, epsilon = 1e-8);
        }
    }

    #[test]
    fn builds_are_deterministic_and_seed_sensitive() {
        let a = esn_build(8, 0.8, InputCase::CaseI, 5).unwrap();
        let b = esn_build(8, 0.8, InputCase::CaseI, 5).unwrap();
        assert_eq!(a, b);
        let c = esn_build(8, 0.8, InputCase::CaseI, 6).unwrap();
        assert_ne!(a.internal, c.internal);
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(esn_build(0, 0.5, InputCase::CaseI, 1).is_err());
        assert!(esn_build(3, 0.0, InputCase::CaseI, 1).is_err());
        assert!(esn_build(3, -1.0, InputCase::CaseI, 1).is_err());
    }

    #[test]
    fn zero_state_with_zero_input_is_fixed_under_case_two() {
        let sys = esn_build(6, 0.7, InputCase::CaseII, 9).unwrap();
        let mut x = DVector::zeros(6);
        for _ in 0..10 {
            esn_step(&mut x, 0.0, &sys).unwrap();
        }
        assert!(x.iter().all(|&v| v == 0.0));
        // Case I drives the same state away from zero.
        let sys1 = EsnSystem {
            input_case: InputCase::CaseI,
            ..sys
        };
        let mut x1 = DVector::zeros(6);
        esn_step(&mut x1, 0.0, &sys1).unwrap();
        assert!(x1.iter().any(|&v| v != 0.0));
    }

    #[test]
    fn states_stay_inside_the_open_unit_cube() {
        let sys = esn_build(12, 1.95, InputCase::CaseI, 11).unwrap();
        let mut rng = seed::rng(11, &[tags::INPUT]);
        let inputs = random_binary_inputs(500, &mut rng);
        let design = esn_run(&sys, &inputs).unwrap();
        for k in 0..design.nrows() {
            for i in 1..design.ncols() {
                let v = design[(k, i)];
                assert!(v > -1.0 && v < 1.0);
            }
        }
    }

    #[test]
    fn two_node_hand_example() {
        let sys = EsnSystem {
            n_nodes: 2,
            internal: DMatrix::from_row_slice(2, 2, &[0.5, 0.0, 0.0, 0.5]),
            input: DVector::from_column_slice(&[1.0, 1.0]),
            spectral_radius_target: 0.5,
            input_case: InputCase::CaseII,
        };
        let mut x = DVector::zeros(2);
        esn_step(&mut x, 1.0, &sys).unwrap();
        let t = math::tanh(1.0);
        assert_abs_diff_eq!(x[0], t, epsilon = 1e-15);
        assert_abs_diff_eq!(x[1], t, epsilon = 1e-15);
    }

    #[test]
    fn capacity_sample_produces_sane_curves() {
        let phases = Phases {
            washout: 50,
            train: 400,
            eval: 150,
        };
        let (stm, pc) = esn_capacity_sample(10, 0.9, InputCase::CaseI, 21, 15, phases).unwrap();
        assert_eq!(stm.per_delay.len(), 16);
        assert_eq!(pc.per_delay.len(), 16);
        assert!(stm.per_delay[0] > 0.9, "C_STM(0) = {}", stm.per_delay[0]);
        assert!(stm.capacity > 0.5);
    }

    #[test]
    fn benchmark_aggregates_and_ranks_radii() {
        let phases = Phases {
            washout: 50,
            train: 400,
            eval: 150,
        };
        // Hand-rolled two-radius sweep over tiny phases to keep it fast.
        let mut results = Vec::new();
        for (r_idx, radius) in [0.05, 0.9].iter().enumerate() {
            let mut stm_s = Vec::new();
            let mut pc_s = Vec::new();
            for s_idx in 0..3u64 {
                let seed = seed::child_seed(33, &[tags::SAMPLE, r_idx as u64, s_idx]);
                let (a, b) =
                    esn_capacity_sample(10, *radius, InputCase::CaseI, seed, 15, phases).unwrap();
                stm_s.push(a);
                pc_s.push(b);
            }
            results.push(radius_result(*radius, stm_s, pc_s, 15));
        }
        let best = best_radius_index(&results);
        assert!(results[best].total_mean >= results[1 - best].total_mean);
        for r in &results {
            assert_eq!(r.total_per_sample.len(), 3);
            assert!(r.total_std >= 0.0);
        }
    }
}
