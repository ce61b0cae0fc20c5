//! Timer task: input flips 0 to 1 at a cue step; the target fires exactly
//! once, a fixed delay after the cue.

use super::{TargetSeries, TaskStream};
use crate::error::CoreError;
use crate::reservoir::Phases;
use crate::Result;
use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

/// Trial length of the reference protocol.
pub const TIMER_TOTAL: usize = 800;
/// Leading steps of each trial discarded as transients.
pub const TIMER_DISCARD: usize = 400;
/// Cue step of the reference protocol.
pub const TIMER_CUE: usize = 500;

/// Target that is 1 only at `cue_step + tau_timer`.
pub fn timer_target(cue_step: usize, tau_timer: usize, total: usize) -> Result<Vec<f64>> {
    let fire = cue_step
        .checked_add(tau_timer)
        .ok_or(CoreError::Parameter("timer delay overflows"))?;
    if fire >= total {
        return Err(CoreError::Parameter("timer fires outside the trial"));
    }
    let mut target = vec![0.0; total];
    target[fire] = 1.0;
    Ok(target)
}

/// Step input 0 -> 1 at `cue_step` with a single-spike target.
pub fn timer_stream(cue_step: usize, tau_timer: usize, total: usize) -> Result<TaskStream> {
    if cue_step >= total {
        return Err(CoreError::Parameter("timer cue outside the trial"));
    }
    let target = timer_target(cue_step, tau_timer, total)?;
    let inputs: Vec<f64> = (0..total)
        .map(|k| if k >= cue_step { 1.0 } else { 0.0 })
        .collect();
    let stream = TaskStream {
        name: "timer".to_string(),
        raw_inputs: inputs.clone(),
        inputs,
        targets: vec![TargetSeries {
            name: format!("timer{tau_timer}"),
            values: target,
        }],
        phases: Phases {
            washout: 0,
            train: 0,
            eval: total,
        },
        params: vec![
            ("cue_step".to_string(), cue_step as f64),
            ("tau_timer".to_string(), tau_timer as f64),
        ],
    };
    stream.validate()?;
    Ok(stream)
}
