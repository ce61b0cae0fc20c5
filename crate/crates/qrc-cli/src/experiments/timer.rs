//! Timer task sweep: each sample is one disordered system scored over a
//! range of cue-to-fire delays from repeated trials with random product
//! initial states.

use crate::config::{
    cell_csv_header, enumerate_cells, sample_seed, Cell, CellParams, ExperimentConfig,
    SEED_LINEAGE,
};
use crate::error::CliError;
use crate::output::{self, CurveStats, OutDir, SampleFailure, Timings};
use crate::sweep;
use nalgebra::DMatrix;
use qrc_core::readout::{capacity_single, predict_batch, DesignFactor};
use qrc_core::reservoir::Phases;
use qrc_core::tasks::{
    aggregate_curves, timer_stream, timer_target, SampleCapacities, TIMER_CUE, TIMER_DISCARD,
    TIMER_TOTAL,
};
use qrc_core::{seed, CoreError, ReservoirSystem, SignalMatrix};
use serde::Serialize;

/// Run `n_trials` independent trials of one system. Every trial drives the
/// same cue stream from a fresh random product state; the initial-state and
/// observation streams advance sequentially across trials.
pub fn timer_trials(
    cell: &CellParams,
    n_trials: usize,
    seed_value: u64,
) -> Result<Vec<SignalMatrix>, CoreError> {
    let phases = Phases {
        washout: 0,
        train: TIMER_TOTAL,
        eval: 0,
    };
    let system = ReservoirSystem::new(cell.reservoir_config(phases, seed_value))?;
    let stream = timer_stream(TIMER_CUE, 0, TIMER_TOTAL)?;
    let mut init_rng = seed::rng(seed_value, &[seed::tags::INITIAL_STATE]);
    let mut obs_rng = seed::rng(seed_value, &[seed::tags::OBSERVATION]);
    let mut trials = Vec::with_capacity(n_trials);
    for _ in 0..n_trials {
        let state = system.random_initial_state(&mut init_rng)?;
        let (matrix, _) = system.run_from(state, &stream.inputs, &mut obs_rng)?;
        trials.push(matrix);
    }
    Ok(trials)
}

/// Score a delay sweep from per-trial signal matrices. The first
/// `train_trials` matrices train one shared readout per delay; the rest are
/// scored. Only rows past the transient cut enter either side. The summary
/// value is the plain sum over delays; no noise floor is subtracted because
/// each delay contributes a single spike, not a stationary target.
pub fn timer_capacity(
    trials: &[SignalMatrix],
    train_trials: usize,
    eval_trials: usize,
    tau_max: usize,
) -> Result<SampleCapacities, CoreError> {
    if trials.len() < train_trials + eval_trials || train_trials == 0 || eval_trials == 0 {
        return Err(CoreError::Parameter("timer trial split is infeasible"));
    }
    let kept = TIMER_TOTAL - TIMER_DISCARD;
    let cols = trials[0].data().ncols();
    let stack = |range: core::ops::Range<usize>| -> DMatrix<f64> {
        let mut m = DMatrix::zeros(range.len() * kept, cols);
        for (i, t) in range.enumerate() {
            m.view_mut((i * kept, 0), (kept, cols))
                .copy_from(&trials[t].block(TIMER_DISCARD..TIMER_TOTAL));
        }
        m
    };
    let train = stack(0..train_trials);
    let eval = stack(train_trials..train_trials + eval_trials);
    let factor = DesignFactor::new(&train)?;

    let mut train_targets = DMatrix::zeros(train_trials * kept, tau_max + 1);
    let mut eval_targets = vec![vec![0.0; eval_trials * kept]; tau_max + 1];
    for tau in 0..=tau_max {
        let target = timer_target(TIMER_CUE, tau, TIMER_TOTAL)?;
        let kept_target = &target[TIMER_DISCARD..];
        for trial in 0..train_trials {
            for (r, &y) in kept_target.iter().enumerate() {
                train_targets[(trial * kept + r, tau)] = y;
            }
        }
        for trial in 0..eval_trials {
            eval_targets[tau][trial * kept..(trial + 1) * kept].copy_from_slice(kept_target);
        }
    }
    let batch = factor.solve_batch(&train_targets)?;
    let preds = predict_batch(&eval, &batch)?;
    let mut per_delay = Vec::with_capacity(tau_max + 1);
    for tau in 0..=tau_max {
        let outputs: Vec<f64> = preds.column(tau).iter().copied().collect();
        per_delay.push(capacity_single(&outputs, &eval_targets[tau])?);
    }
    let capacity = per_delay.iter().sum();
    Ok(SampleCapacities { per_delay, capacity })
}

#[derive(Serialize)]
struct CellResult {
    cell: Cell,
    ok_samples: usize,
    capacity: CurveStats,
    failures: Vec<SampleFailure>,
}

#[derive(Serialize)]
struct Summary<'a> {
    experiment: &'static str,
    seed_lineage: &'static str,
    tau_max: usize,
    train_trials: usize,
    eval_trials: usize,
    config: &'a ExperimentConfig,
    cells: Vec<CellResult>,
}

pub fn run(config: &ExperimentConfig, out: &OutDir) -> Result<i32, CliError> {
    let cells = enumerate_cells(&config.grid);
    let opts = config.timer;
    let n_trials = opts.train_trials + opts.eval_trials;
    let units = sweep::units(cells.len(), config.samples, |c| cells[c].physical_index);
    let outcomes = sweep::parallel_map(&units, |u| {
        let seed_value = sample_seed(config.seed, u.physical, u.sample);
        timer_trials(&cells[u.cell].params, n_trials, seed_value)
            .and_then(|t| timer_capacity(&t, opts.train_trials, opts.eval_trials, opts.tau_max))
            .map_err(|e| e.to_string())
    });
    let (per_cell, cell_seconds) = sweep::by_cell(outcomes, cells.len(), config.samples);

    let mut results = Vec::with_capacity(cells.len());
    let mut csv_rows = Vec::with_capacity(cells.len());
    for (cell, samples) in cells.iter().zip(per_cell) {
        let (ok, failures) = output::collect_samples(samples);
        let curve = aggregate_curves(&ok, opts.tau_max);
        let mut row = cell.params.csv_fields();
        row.extend([
            ok.len().to_string(),
            failures.len().to_string(),
            curve.capacity_mean.to_string(),
            curve.capacity_std.to_string(),
        ]);
        csv_rows.push(row);
        results.push(CellResult {
            cell: cell.clone(),
            ok_samples: ok.len(),
            capacity: CurveStats::from(&curve),
            failures,
        });
    }

    let mut header = cell_csv_header();
    header.extend(
        ["ok_samples", "failed_samples", "capacity_mean", "capacity_std"].map(String::from),
    );
    out.write_csv("curve.csv", &header, &csv_rows)?;
    out.write_json(
        "summary.json",
        &Summary {
            experiment: "timer",
            seed_lineage: SEED_LINEAGE,
            tau_max: opts.tau_max,
            train_trials: opts.train_trials,
            eval_trials: opts.eval_trials,
            config,
            cells: results,
        },
    )?;
    out.write_json(
        "timings.json",
        &Timings {
            total_seconds: cell_seconds.iter().sum(),
            cell_seconds,
        },
    )?;

    if config.dump_signals {
        let cell = &cells[0];
        let seed_value = sample_seed(config.seed, cell.physical_index, 0);
        let trials = timer_trials(&cell.params, 1, seed_value)?;
        let stream = timer_stream(TIMER_CUE, 0, TIMER_TOTAL)?;
        #[derive(Serialize)]
        struct Provenance<'a> {
            cell: &'a Cell,
            sample: usize,
            trial: usize,
            seed: u64,
        }
        output::write_signals(
            out,
            &trials[0],
            &stream.inputs,
            &Provenance {
                cell,
                sample: 0,
                trial: 0,
                seed: seed_value,
            },
        )?;
    }
    Ok(0)
}
