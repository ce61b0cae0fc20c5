//! NARMA reference systems of orders 2/5/10/15/20 driven by sine or uniform
//! random inputs in [0, 0.2].

use super::{TargetSeries, TaskStream};
use crate::error::CoreError;
use crate::math;
use crate::reservoir::Phases;
use crate::seed::{self, tags};
use crate::Result;
use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
use rand::Rng;

/// Orders of the benchmark suite.
pub const NARMA_ORDERS: [usize; 5] = [2, 5, 10, 15, 20];

/// Washout / train / eval lengths of the benchmark protocol.
pub const NARMA_PHASES: Phases = Phases {
    washout: 1000,
    train: 3000,
    eval: 1000,
};

/// Higher-order coefficients (alpha, beta, gamma, delta).
const COEFF: (f64, f64, f64, f64) = (0.3, 0.05, 1.5, 0.1);

/// Recursion bound; beyond it the input range must have been violated.
const NARMA_BOUND: f64 = 10.0;

/// Second-order update y_{k+1} = 0.4 y_k + 0.4 y_k y_{k-1} + 0.6 s_k^3 + 0.1.
pub fn narma2_step(y_k: f64, y_km1: f64, s_k: f64) -> Result<f64> {
    let y = 0.4 * y_k + 0.4 * y_k * y_km1 + 0.6 * s_k * s_k * s_k + 0.1;
    check_bounded(y, 0)
}

/// Order-n update on `history` (oldest first, newest last) and the matching
/// input window s_{k-n+1}..s_k:
/// y_{k+1} = alpha y_k + beta y_k sum_{j<n} y_{k-j} + gamma s_{k-n+1} s_k + delta.
pub fn narma_n_step(history: &[f64], s_window: &[f64], n: usize) -> Result<f64> {
    if !matches!(n, 5 | 10 | 15 | 20) {
        return Err(CoreError::Parameter("order must be 5, 10, 15 or 20"));
    }
    if history.len() < n || s_window.len() < n {
        return Err(CoreError::LengthMismatch {
            what: "recursion history",
            expected: n,
            actual: history.len().min(s_window.len()),
        });
    }
    let (alpha, beta, gamma, delta) = COEFF;
    let y_hist = &history[history.len() - n..];
    let s_win = &s_window[s_window.len() - n..];
    let y_k = y_hist[n - 1];
    let running: f64 = y_hist.iter().sum();
    let y = alpha * y_k + beta * y_k * running + gamma * s_win[0] * s_win[n - 1] + delta;
    check_bounded(y, 0)
}

fn check_bounded(y: f64, step: usize) -> Result<f64> {
    if !y.is_finite() || math::abs(y) > NARMA_BOUND {
        return Err(CoreError::Diverged {
            step,
            magnitude: math::abs(y),
        });
    }
    Ok(y)
}

/// Full trajectory: out[k] is the recursion value after consuming raw input
/// k, with zero-initialized history and zero-padded inputs.
pub fn narma_sequence(order: usize, raw_inputs: &[f64]) -> Result<Vec<f64>> {
    if order != 2 && !matches!(order, 5 | 10 | 15 | 20) {
        return Err(CoreError::Parameter("order must be 2, 5, 10, 15 or 20"));
    }
    let mut ys: Vec<f64> = Vec::with_capacity(raw_inputs.len() + 1);
    ys.push(0.0);
    let mut out = Vec::with_capacity(raw_inputs.len());
    for (k, &s_k) in raw_inputs.iter().enumerate() {
        let y = if order == 2 {
            let y_k = ys[k];
            let y_km1 = if k >= 1 { ys[k - 1] } else { 0.0 };
            narma2_step(y_k, y_km1, s_k)
        } else {
            let mut hist = [0.0; 20];
            let mut s_win = [0.0; 20];
            for j in 0..order {
                // slot order-1-j holds lag j
                if j <= k {
                    hist[order - 1 - j] = ys[k - j];
                    s_win[order - 1 - j] = raw_inputs[k - j];
                }
            }
            narma_n_step(&hist[..order], &s_win[..order], order)
        };
        let y = y.map_err(|e| match e {
            CoreError::Diverged { magnitude, .. } => CoreError::Diverged { step: k, magnitude },
            other => other,
        })?;
        ys.push(y);
        out.push(y);
    }
    Ok(out)
}

/// Product-of-sines input in [0, 0.2]:
/// s_k = 0.1 (sin(2 pi 2.11 k / 100) sin(2 pi 3.73 k / 100) sin(2 pi 4.11 k / 100) + 1).
pub fn sine_input(k: usize) -> f64 {
    let t = 2.0 * core::f64::consts::PI * (k as f64) / 100.0;
    0.1 * (math::sin(2.11 * t) * math::sin(3.73 * t) * math::sin(4.11 * t) + 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NarmaInput {
    Sine,
    UniformRandom,
}

/// Stream with all five NARMA targets. Raw inputs lie in [0, 0.2] and drive
/// the recursions; injected inputs are the raw values rescaled by 5 into
/// [0, 1]. `seed` only matters for uniform random inputs.
pub fn narma_suite_stream(kind: NarmaInput, seed: u64) -> Result<TaskStream> {
    let total = NARMA_PHASES.total();
    let raw: Vec<f64> = match kind {
        NarmaInput::Sine => (0..total).map(sine_input).collect(),
        NarmaInput::UniformRandom => {
            let mut rng = seed::rng(seed, &[tags::INPUT]);
            (0..total).map(|_| rng.random_range(0.0..=0.2)).collect()
        }
    };
    let inputs: Vec<f64> = raw.iter().map(|s| 5.0 * s).collect();
    let mut targets = Vec::with_capacity(NARMA_ORDERS.len());
    for order in NARMA_ORDERS {
        targets.push(TargetSeries {
            name: format!("narma{order}"),
            values: narma_sequence(order, &raw)?,
        });
    }
    let name = match kind {
        NarmaInput::Sine => "narma-sine",
        NarmaInput::UniformRandom => "narma-random",
    };
    let stream = TaskStream {
        name: name.to_string(),
        inputs,
        raw_inputs: raw,
        targets,
        phases: NARMA_PHASES,
        params: vec![("total".to_string(), total as f64)],
    };
    stream.validate()?;
    Ok(stream)
}
