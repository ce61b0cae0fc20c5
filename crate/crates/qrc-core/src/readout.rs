//! Linear readout: least-squares training, prediction, error and capacity
//! metrics, and teacher-forced / closed-loop generation.
//!
//! Training minimizes the mean square error over the training rows via an
//! SVD pseudoinverse with a relative singular-value cutoff. The factorization
//! is exposed separately ([`DesignFactor`]) because capacity curves train
//! hundreds of targets against one design matrix.

use crate::error::CoreError;
use crate::reservoir::{ReservoirState, ReservoirSystem};
use crate::Result;
use alloc::vec;
use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Relative singular-value cutoff of the pseudoinverse.
pub const SV_CUTOFF: f64 = 1e-12;

/// Output bound beyond which a closed-loop run is declared divergent.
const DIVERGENCE_BOUND: f64 = 10.0;

/// Trained weights with diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct ReadoutWeights {
    /// Length equals the design-matrix column count (bias first).
    pub weights: DVector<f64>,
    /// Mean square error on the training rows.
    pub training_residual: f64,
    /// Number of singular values above the cutoff.
    pub rank: usize,
}

/// Evaluation summary over a window.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    /// Normalized mean squared error: sum (t - y)^2 / sum t^2.
    pub nmse: f64,
    /// Squared Pearson correlation; absent when either side has zero
    /// variance over the window.
    pub capacity_value: Option<f64>,
    pub outputs: Vec<f64>,
    pub targets: Vec<f64>,
}

impl EvalReport {
    pub fn new(outputs: Vec<f64>, targets: Vec<f64>) -> Result<Self> {
        let nmse = nmse(&outputs, &targets)?;
        let capacity_value = capacity_single(&outputs, &targets).ok();
        Ok(EvalReport {
            nmse,
            capacity_value,
            outputs,
            targets,
        })
    }
}

/// SVD factorization of a design matrix, reusable across many targets.
/// Keeps the design itself so training residuals come from the difference
/// X w - y directly (the norm identity loses them to cancellation).
pub struct DesignFactor {
    x: DMatrix<f64>,
    u: DMatrix<f64>,
    v_t: DMatrix<f64>,
    singular_values: DVector<f64>,
    cutoff: f64,
    rank: usize,
    rows: usize,
}

impl DesignFactor {
    pub fn new(x: &DMatrix<f64>) -> Result<Self> {
        let (rows, cols) = x.shape();
        if rows < cols {
            return Err(CoreError::Underdetermined { rows, cols });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(CoreError::NonFinite("design matrix"));
        }
        let svd = x.clone().svd(true, true);
        let u = svd.u.ok_or(CoreError::Numerical {
            what: "design SVD",
            detail: "left singular vectors unavailable",
        })?;
        let v_t = svd.v_t.ok_or(CoreError::Numerical {
            what: "design SVD",
            detail: "right singular vectors unavailable",
        })?;
        let singular_values = svd.singular_values;
        let s_max = singular_values.iter().cloned().fold(0.0, f64::max);
        let cutoff = SV_CUTOFF * s_max;
        let rank = singular_values.iter().filter(|&&s| s > cutoff).count();
        Ok(DesignFactor {
            x: x.clone(),
            u,
            v_t,
            singular_values,
            cutoff,
            rank,
            rows,
        })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Minimum-norm least-squares weights for one target.
    pub fn solve(&self, targets: &[f64]) -> Result<ReadoutWeights> {
        if targets.len() != self.rows {
            return Err(CoreError::LengthMismatch {
                what: "target sequence",
                expected: self.rows,
                actual: targets.len(),
            });
        }
        if targets.iter().any(|v| !v.is_finite()) {
            return Err(CoreError::NonFinite("targets"));
        }
        let y = DVector::from_column_slice(targets);
        let mut coeff = self.u.tr_mul(&y);
        for i in 0..coeff.nrows() {
            if self.singular_values[i] > self.cutoff {
                coeff[i] /= self.singular_values[i];
            } else {
                coeff[i] = 0.0;
            }
        }
        let weights = self.v_t.tr_mul(&coeff);
        let training_residual = (&self.x * &weights - y).norm_squared() / self.rows as f64;
        Ok(ReadoutWeights {
            weights,
            training_residual,
            rank: self.rank,
        })
    }

    /// Solve many targets at once (columns of `targets`); a few dense
    /// products replace per-target passes.
    pub fn solve_batch(&self, targets: &DMatrix<f64>) -> Result<BatchWeights> {
        if targets.nrows() != self.rows {
            return Err(CoreError::LengthMismatch {
                what: "target matrix rows",
                expected: self.rows,
                actual: targets.nrows(),
            });
        }
        let mut scaled = self.u.tr_mul(targets);
        let n_targets = targets.ncols();
        for t in 0..n_targets {
            for i in 0..scaled.nrows() {
                if self.singular_values[i] > self.cutoff {
                    scaled[(i, t)] /= self.singular_values[i];
                } else {
                    scaled[(i, t)] = 0.0;
                }
            }
        }
        let weights = self.v_t.tr_mul(&scaled);
        let misfit = &self.x * &weights - targets;
        let residuals: Vec<f64> = (0..n_targets)
            .map(|t| misfit.column(t).norm_squared() / self.rows as f64)
            .collect();
        Ok(BatchWeights {
            weights,
            training_residuals: residuals,
            rank: self.rank,
        })
    }
}

/// Weights for a family of targets trained against one design matrix.
pub struct BatchWeights {
    /// cols x targets; column t holds the weights of target t.
    pub weights: DMatrix<f64>,
    pub training_residuals: Vec<f64>,
    pub rank: usize,
}

impl BatchWeights {
    pub fn column(&self, t: usize) -> ReadoutWeights {
        ReadoutWeights {
            weights: self.weights.column(t).into_owned(),
            training_residual: self.training_residuals[t],
            rank: self.rank,
        }
    }

    pub fn n_targets(&self) -> usize {
        self.weights.ncols()
    }
}

/// Train weights for one target (factorize + solve).
pub fn train(x: &DMatrix<f64>, targets: &[f64]) -> Result<ReadoutWeights> {
    DesignFactor::new(x)?.solve(targets)
}

/// Row-wise products X w.
pub fn predict(x: &DMatrix<f64>, w: &ReadoutWeights) -> Result<Vec<f64>> {
    if x.ncols() != w.weights.nrows() {
        return Err(CoreError::DimensionMismatch {
            expected: w.weights.nrows(),
            actual: x.ncols(),
        });
    }
    Ok((x * &w.weights).iter().cloned().collect())
}

/// Predictions for every target of a batch: rows x targets.
pub fn predict_batch(x: &DMatrix<f64>, w: &BatchWeights) -> Result<DMatrix<f64>> {
    if x.ncols() != w.weights.nrows() {
        return Err(CoreError::DimensionMismatch {
            expected: w.weights.nrows(),
            actual: x.ncols(),
        });
    }
    Ok(x * &w.weights)
}

/// Normalized mean squared error sum (t - y)^2 / sum t^2.
pub fn nmse(outputs: &[f64], targets: &[f64]) -> Result<f64> {
    if outputs.len() != targets.len() || outputs.is_empty() {
        return Err(CoreError::LengthMismatch {
            what: "output sequence",
            expected: targets.len(),
            actual: outputs.len(),
        });
    }
    let denom: f64 = targets.iter().map(|t| t * t).sum();
    if denom == 0.0 {
        return Err(CoreError::UndefinedMeasure("NMSE of all-zero targets"));
    }
    let num: f64 = outputs
        .iter()
        .zip(targets)
        .map(|(y, t)| (t - y) * (t - y))
        .sum();
    Ok(num / denom)
}

/// Squared Pearson correlation cov^2 / (var_y var_t).
pub fn capacity_single(outputs: &[f64], targets: &[f64]) -> Result<f64> {
    if outputs.len() != targets.len() || outputs.len() < 2 {
        return Err(CoreError::LengthMismatch {
            what: "output sequence",
            expected: targets.len(),
            actual: outputs.len(),
        });
    }
    let n = outputs.len() as f64;
    let my: f64 = outputs.iter().sum::<f64>() / n;
    let mt: f64 = targets.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut vy = 0.0;
    let mut vt = 0.0;
    for (y, t) in outputs.iter().zip(targets) {
        let dy = y - my;
        let dt = t - mt;
        cov += dy * dt;
        vy += dy * dy;
        vt += dt * dt;
    }
    if vy == 0.0 || vt == 0.0 {
        return Err(CoreError::UndefinedMeasure(
            "capacity of a constant sequence",
        ));
    }
    Ok((cov * cov) / (vy * vt))
}

/// Summed capacity with the floor value at the largest delay subtracted from
/// every term: sum_{d=0..max} [C(d) - C(max)]. Negative terms not clamped.
pub fn capacity_sum(per_delay: &[f64], tau_b_max: usize) -> Result<f64> {
    if per_delay.len() != tau_b_max + 1 {
        return Err(CoreError::LengthMismatch {
            what: "per-delay capacities",
            expected: tau_b_max + 1,
            actual: per_delay.len(),
        });
    }
    let floor = per_delay[tau_b_max];
    Ok(per_delay.iter().map(|c| c - floor).sum())
}

/// Drive the reservoir with the teacher for `switch_step` steps, then feed
/// back its own output (clipped to [0,1] before injection). Returns the
/// output at every step. `train_noise` adds uniform noise in
/// [-train_noise, train_noise] to the recorded signals of teacher-forced
/// steps, mirroring the conditions the weights were trained under.
///
/// Divergence (|y| > 10) aborts with an error naming the step; callers
/// record it and continue their sweeps.
pub fn closed_loop_generate(
    system: &ReservoirSystem,
    w: &ReadoutWeights,
    teacher: &[f64],
    switch_step: usize,
    total_steps: usize,
    train_noise: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<f64>> {
    let state = system.initial_state()?;
    let (outputs, _) = closed_loop_from(
        system,
        w,
        state,
        0.0,
        teacher,
        switch_step,
        total_steps,
        train_noise,
        rng,
    )?;
    Ok(outputs)
}

/// Closed-loop engine starting from an explicit state. `carry_in` seeds the
/// input of step 0 when the loop starts already closed (switch_step = 0),
/// e.g. the final teacher value of a separate training run.
#[allow(clippy::too_many_arguments)]
pub fn closed_loop_from(
    system: &ReservoirSystem,
    w: &ReadoutWeights,
    state: ReservoirState,
    carry_in: f64,
    teacher: &[f64],
    switch_step: usize,
    total_steps: usize,
    train_noise: f64,
    rng: &mut ChaCha8Rng,
) -> Result<(Vec<f64>, ReservoirState)> {
    if switch_step > teacher.len() {
        return Err(CoreError::LengthMismatch {
            what: "teacher sequence",
            expected: switch_step,
            actual: teacher.len(),
        });
    }
    let n_feat = 1 + system.n_signals();
    if w.weights.nrows() != n_feat {
        return Err(CoreError::DimensionMismatch {
            expected: n_feat,
            actual: w.weights.nrows(),
        });
    }
    if !(train_noise >= 0.0) || !train_noise.is_finite() {
        return Err(CoreError::Domain {
            what: "train noise",
            value: train_noise,
        });
    }
    let mut state = state;
    let mut scratch = crate::reservoir::StepScratch::new(system.config().n_qubits);
    let mut signals = vec![0.0; system.n_signals()];
    let mut outputs: Vec<f64> = Vec::with_capacity(total_steps);
    for k in 0..total_steps {
        let input = if k < switch_step {
            teacher[k]
        } else if k == 0 {
            carry_in
        } else {
            outputs[k - 1].clamp(0.0, 1.0)
        };
        system.step_into(&mut state, input, &mut signals, &mut scratch, None)?;
        if train_noise > 0.0 && k < switch_step {
            for s in signals.iter_mut() {
                *s += rng.random_range(-train_noise..=train_noise);
            }
        }
        let mut y = w.weights[0];
        for (i, s) in signals.iter().enumerate() {
            y += w.weights[1 + i] * s;
        }
        if !y.is_finite() || y.abs() > DIVERGENCE_BOUND {
            return Err(CoreError::Diverged {
                step: k,
                magnitude: y.abs(),
            });
        }
        outputs.push(y);
    }
    Ok((outputs, state))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reservoir::ReservoirConfig;
    use crate::seed;
    use approx::assert_abs_diff_eq;
    use rand::Rng;

    fn random_matrix(rows: usize, cols: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = seed::rng(seed, &[77]);
        DMatrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0))
    }

    #[test]
    fn square_system_interpolates() {
        let x = random_matrix(8, 8, 1);
        let y: Vec<f64> = (0..8).map(|k| (k as f64).sin()).collect();
        let w = train(&x, &y).unwrap();
        assert!(w.training_residual <= 1e-18);
        let p = predict(&x, &w).unwrap();
        for (a, b) in p.iter().zip(&y) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-9);
        }
    }

    #[test]
    fn column_target_recovers_unit_weight() {
        let x = random_matrix(60, 6, 2);
        let y: Vec<f64> = x.column(3).iter().cloned().collect();
        let w = train(&x, &y).unwrap();
        assert!(w.training_residual <= 1e-20);
        for (i, wi) in w.weights.iter().enumerate() {
            let expect = if i == 3 { 1.0 } else { 0.0 };
            assert_abs_diff_eq!(*wi, expect, epsilon = 1e-9);
        }
    }

    #[test]
    fn trained_weights_beat_perturbations() {
        let x = random_matrix(200, 11, 3);
        let mut rng = seed::rng(3, &[78]);
        let y: Vec<f64> = (0..200).map(|_| rng.random_range(-1.0..1.0)).collect();
        let w = train(&x, &y).unwrap();
        let base = w.training_residual;
        let yv = DVector::from_column_slice(&y);
        for _ in 0..100 {
            let delta = DVector::from_fn(11, |_, _| rng.random_range(-1.0..1.0) * 1e-3);
            let perturbed = &w.weights + delta;
            let r = (&x * perturbed - &yv).norm_squared() / 200.0;
            assert!(r >= base - 1e-15);
        }
    }

    #[test]
    fn training_residual_matches_prediction_error() {
        let x = random_matrix(50, 5, 4);
        let mut rng = seed::rng(4, &[79]);
        let y: Vec<f64> = (0..50).map(|_| rng.random_range(-1.0..1.0)).collect();
        let w = train(&x, &y).unwrap();
        let p = predict(&x, &w).unwrap();
        let mse: f64 = p
            .iter()
            .zip(&y)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            / 50.0;
        assert_abs_diff_eq!(mse, w.training_residual, epsilon = 1e-12);
    }

    #[test]
    fn underdetermined_and_nonfinite_are_rejected() {
        let x = random_matrix(4, 8, 5);
        assert!(matches!(
            train(&x, &[0.0; 4]),
            Err(CoreError::Underdetermined { .. })
        ));
        let mut x = random_matrix(8, 4, 6);
        x[(0, 0)] = f64::NAN;
        assert!(matches!(train(&x, &[0.0; 8]), Err(CoreError::NonFinite(_))));
    }

    #[test]
    fn batch_solution_matches_individual_solves() {
        let x = random_matrix(40, 7, 7);
        let f = DesignFactor::new(&x).unwrap();
        let ys = random_matrix(40, 3, 8);
        let batch = f.solve_batch(&ys).unwrap();
        for t in 0..3 {
            let single = f.solve(&ys.column(t).iter().cloned().collect::<Vec<_>>()).unwrap();
            let wb = batch.column(t);
            assert!((&single.weights - &wb.weights).norm() < 1e-10);
            assert_abs_diff_eq!(
                single.training_residual,
                wb.training_residual,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn predict_trivial_weight_vectors() {
        let x = random_matrix(10, 3, 9);
        let zero = ReadoutWeights {
            weights: DVector::zeros(3),
            training_residual: 0.0,
            rank: 3,
        };
        assert!(predict(&x, &zero).unwrap().iter().all(|&v| v == 0.0));
        let mut x1 = x.clone();
        x1.column_mut(0).fill(1.0);
        let bias = ReadoutWeights {
            weights: DVector::from_column_slice(&[1.0, 0.0, 0.0]),
            training_residual: 0.0,
            rank: 3,
        };
        assert!(predict(&x1, &bias).unwrap().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn nmse_reference_points() {
        let t = [1.0, 2.0, -1.5, 0.5];
        assert_abs_diff_eq!(nmse(&t, &t).unwrap(), 0.0, epsilon = 1e-15);
        let zeros = [0.0; 4];
        assert_abs_diff_eq!(nmse(&zeros, &t).unwrap(), 1.0, epsilon = 1e-15);
        let double: Vec<f64> = t.iter().map(|v| 2.0 * v).collect();
        assert_abs_diff_eq!(nmse(&double, &t).unwrap(), 1.0, epsilon = 1e-15);
        // Scale sensitivity: nmse(c t, t) = (c - 1)^2.
        for c in [0.5, 1.5, 3.0] {
            let scaled: Vec<f64> = t.iter().map(|v| c * v).collect();
            assert_abs_diff_eq!(nmse(&scaled, &t).unwrap(), (c - 1.0) * (c - 1.0), epsilon = 1e-12);
        }
        assert!(nmse(&zeros, &zeros).is_err());
    }

    #[test]
    fn capacity_reference_points_and_affine_invariance() {
        let t = [1.0, 2.0, -1.5, 0.5, 0.25];
        assert_abs_diff_eq!(capacity_single(&t, &t).unwrap(), 1.0, epsilon = 1e-12);
        let neg: Vec<f64> = t.iter().map(|v| -v + 3.0).collect();
        assert_abs_diff_eq!(capacity_single(&neg, &t).unwrap(), 1.0, epsilon = 1e-12);
        let mut rng = seed::rng(10, &[80]);
        let a: Vec<f64> = (0..200).map(|_| rng.random_range(-1.0..1.0)).collect();
        let b: Vec<f64> = (0..200).map(|_| rng.random_range(-1.0..1.0)).collect();
        let c_ab = capacity_single(&a, &b).unwrap();
        for _ in 0..10 {
            let slope: f64 = if rng.random_bool(0.5) {
                rng.random_range(0.1..2.0)
            } else {
                -rng.random_range(0.1..2.0)
            };
            let shift: f64 = rng.random_range(-5.0..5.0);
            let mapped: Vec<f64> = a.iter().map(|v| slope * v + shift).collect();
            assert_abs_diff_eq!(capacity_single(&mapped, &b).unwrap(), c_ab, epsilon = 1e-10);
        }
        let constant = [2.0; 5];
        assert!(capacity_single(&constant, &t).is_err());
    }

    #[test]
    fn independent_sequences_have_negligible_capacity() {
        let mut rng = seed::rng(11, &[81]);
        let a: Vec<f64> = (0..1000).map(|_| rng.random_range(0.0..1.0)).collect();
        let b: Vec<f64> = (0..1000).map(|_| rng.random_range(0.0..1.0)).collect();
        assert!(capacity_single(&a, &b).unwrap() < 0.02);
    }

    #[test]
    fn capacity_sum_reference_points() {
        let equal = vec![0.4; 501];
        assert_abs_diff_eq!(capacity_sum(&equal, 500).unwrap(), 0.0, epsilon = 1e-12);
        let mut spike = vec![0.0; 501];
        spike[0] = 1.0;
        assert_abs_diff_eq!(capacity_sum(&spike, 500).unwrap(), 1.0, epsilon = 1e-12);
        let geometric: Vec<f64> = (0..=500).map(|d| 0.5f64.powi(d)).collect();
        assert_abs_diff_eq!(capacity_sum(&geometric, 500).unwrap(), 2.0, epsilon = 1e-9);
        assert!(capacity_sum(&[1.0; 10], 500).is_err());
    }

    fn tiny_system(seed: u64) -> ReservoirSystem {
        let mut c = ReservoirConfig::new(2, 1.0, 2, seed);
        c.washout_steps = 2;
        c.train_steps = 4;
        c.eval_steps = 2;
        ReservoirSystem::new(c).unwrap()
    }

    #[test]
    fn closed_loop_with_bias_only_weights_is_constant() {
        let sys = tiny_system(21);
        let mut w = ReadoutWeights {
            weights: DVector::zeros(1 + sys.n_signals()),
            training_residual: 0.0,
            rank: 1,
        };
        w.weights[0] = 0.6;
        let teacher = vec![0.6; 10];
        let mut rng = seed::rng(21, &[seed::tags::TRAIN_NOISE]);
        let out = closed_loop_generate(&sys, &w, &teacher, 5, 20, 0.0, &mut rng).unwrap();
        assert!(out.iter().all(|&y| (y - 0.6).abs() < 1e-12));
    }

    #[test]
    fn fully_teacher_forced_loop_equals_open_loop_prediction() {
        let sys = tiny_system(22);
        let teacher: Vec<f64> = (0..8).map(|k| ((k * 5 % 8) as f64) / 8.0).collect();
        let (matrix, _) = sys
            .run_from(
                sys.initial_state().unwrap(),
                &teacher,
                &mut seed::rng(22, &[seed::tags::OBSERVATION]),
            )
            .unwrap();
        let mut rng = seed::rng(22, &[99]);
        let w = ReadoutWeights {
            weights: DVector::from_fn(1 + sys.n_signals(), |_, _| rng.random_range(-1.0..1.0)),
            training_residual: 0.0,
            rank: 0,
        };
        let open = predict(matrix.data(), &w).unwrap();
        let mut nrng = seed::rng(22, &[seed::tags::TRAIN_NOISE]);
        let closed = closed_loop_generate(&sys, &w, &teacher, 8, 8, 0.0, &mut nrng).unwrap();
        for (a, b) in closed.iter().zip(&open) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn divergence_is_reported_with_step() {
        let sys = tiny_system(23);
        let mut w = ReadoutWeights {
            weights: DVector::zeros(1 + sys.n_signals()),
            training_residual: 0.0,
            rank: 1,
        };
        w.weights[0] = 11.0;
        let mut rng = seed::rng(23, &[seed::tags::TRAIN_NOISE]);
        let got = closed_loop_generate(&sys, &w, &[0.5], 1, 5, 0.0, &mut rng);
        assert!(matches!(got, Err(CoreError::Diverged { step: 0, .. })));
    }
}
