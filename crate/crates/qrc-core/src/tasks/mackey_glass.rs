//! Mackey-Glass delay series: forward-Euler integration at a fine step,
//! subsampled and rescaled into [0,1] for one-step-ahead prediction.

use super::{TargetSeries, TaskStream};
use crate::error::CoreError;
use crate::math;
use crate::reservoir::Phases;
use crate::Result;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

/// Integration step of the underlying delay differential equation.
pub const MG_FINE_STEP: f64 = 0.1;
/// Fine steps per recorded point.
pub const MG_SUBSAMPLE: usize = 10;
/// Fine steps discarded before collection starts.
pub const MG_WASHOUT_FINE: usize = 10_000;
/// Recorded points of the benchmark protocol.
pub const MG_DEFAULT_TOTAL: usize = 12_000;
pub const MG_TRAIN_STEPS: usize = 10_000;
pub const MG_EVAL_STEPS: usize = 2_000;

/// One forward-Euler fine step
/// y' = y + dt (0.2 y_d / (1 + y_d^10) - 0.1 y) with y_d the delayed value.
pub fn mg_fine_step(y: f64, y_delayed: f64) -> f64 {
    let y10 = math::powi(y_delayed, 10);
    y + MG_FINE_STEP * (0.2 * y_delayed / (1.0 + y10) - 0.1 * y)
}

/// Generate `total` coarse points (plus one for the final target) after the
/// washout, starting from a constant 1.2 history. Raw values are kept in
/// `raw_inputs`; `inputs`/targets are linearly rescaled to [0,1] with the
/// (min, max) of the collected window recorded in `params`.
pub fn mackey_glass_stream(tau_mg: f64, total: usize) -> Result<TaskStream> {
    if !(tau_mg > 0.0) || !tau_mg.is_finite() {
        return Err(CoreError::Domain {
            what: "delay",
            value: tau_mg,
        });
    }
    let ratio = tau_mg / MG_FINE_STEP;
    let delay_steps = math::round(ratio) as usize;
    if math::abs(ratio - delay_steps as f64) > 1e-9 * ratio.max(1.0) || delay_steps == 0 {
        return Err(CoreError::Parameter(
            "delay must be a positive multiple of the integration step",
        ));
    }
    if total < 2 {
        return Err(CoreError::Parameter("need at least two recorded points"));
    }

    let fine_needed = MG_WASHOUT_FINE + total * MG_SUBSAMPLE + 1;
    let mut ys: Vec<f64> = Vec::with_capacity(delay_steps + fine_needed);
    ys.resize(delay_steps + 1, 1.2);
    for t in 0..fine_needed {
        let idx = delay_steps + t;
        let y = ys[idx];
        let yd = ys[idx - delay_steps];
        ys.push(mg_fine_step(y, yd));
    }
    // ys[delay_steps] is the first post-history value y_0.
    let coarse: Vec<f64> = (0..=total)
        .map(|j| ys[delay_steps + MG_WASHOUT_FINE + MG_SUBSAMPLE * j])
        .collect();

    let min = coarse.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = coarse.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !(max > min) {
        return Err(CoreError::Numerical {
            what: "series rescaling",
            detail: "collected window is constant",
        });
    }
    let scale = |y: f64| (y - min) / (max - min);

    let phases = if total == MG_DEFAULT_TOTAL {
        Phases {
            washout: 0,
            train: MG_TRAIN_STEPS,
            eval: MG_EVAL_STEPS,
        }
    } else {
        let eval = (total / 6).max(1);
        Phases {
            washout: 0,
            train: total - eval,
            eval,
        }
    };

    let stream = TaskStream {
        name: "mackey-glass".to_string(),
        inputs: coarse[..total].iter().map(|&y| scale(y)).collect(),
        raw_inputs: coarse[..total].to_vec(),
        targets: vec![TargetSeries {
            name: "next".to_string(),
            values: coarse[1..].iter().map(|&y| scale(y)).collect(),
        }],
        phases,
        params: vec![
            ("tau_mg".to_string(), tau_mg),
            ("scale_min".to_string(), min),
            ("scale_max".to_string(), max),
        ],
    };
    stream.validate()?;
    Ok(stream)
}
