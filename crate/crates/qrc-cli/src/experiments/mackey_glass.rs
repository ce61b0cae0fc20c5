//! Chaotic-series continuation: train one step-ahead readout on a delayed
//! feedback series, then run the loop closed and estimate the divergence
//! rate from a twin run with a perturbed handoff.

use crate::config::{
    cell_csv_header, enumerate_cells, sample_seed, Cell, CellParams, ExperimentConfig, MgOptions,
    SEED_LINEAGE,
};
use crate::error::CliError;
use crate::output::{self, MetricStats, OutDir, SampleFailure, Timings};
use crate::sweep;
use qrc_core::readout::{closed_loop_from, nmse, DesignFactor, ReadoutWeights};
use qrc_core::reservoir::Phases;
use qrc_core::tasks::{
    lyapunov_estimate, mackey_glass_stream, LYAPUNOV_HORIZON, LYAPUNOV_WINDOW, MG_DEFAULT_TOTAL,
    MG_EVAL_STEPS, MG_TRAIN_STEPS,
};
use qrc_core::{seed, CoreError, ReservoirState, ReservoirSystem};
use rand::Rng;
use serde::Serialize;

/// One closed-loop evaluation. `diverged` marks runs whose feedback loop
/// blew up; their scores are absent rather than failures.
#[derive(Debug, Clone, Serialize)]
pub struct MgSample {
    pub closed_nmse: Option<f64>,
    pub lambda: Option<f64>,
    pub diverged: bool,
}

fn closed_outputs(
    system: &ReservoirSystem,
    w: &ReadoutWeights,
    state: ReservoirState,
    carry_in: f64,
) -> Result<Option<Vec<f64>>, CoreError> {
    // The loop ignores its rng at zero train noise with no teacher phase.
    let mut rng = seed::rng(0, &[]);
    match closed_loop_from(system, w, state, carry_in, &[], 0, MG_EVAL_STEPS, 0.0, &mut rng) {
        Ok((outputs, _)) => Ok(Some(outputs)),
        Err(CoreError::Diverged { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Train on the open-loop phase, close the loop for the continuation, and
/// score it. The readout trains on a noise-regularized copy of the design
/// block; the handoff prediction comes from the clean final train row.
pub fn mg_sample(
    cell: &CellParams,
    opts: &MgOptions,
    seed_value: u64,
) -> Result<MgSample, CoreError> {
    let stream = mackey_glass_stream(opts.tau_mg, MG_DEFAULT_TOTAL)?;
    let phases = Phases {
        washout: opts.washout_rows,
        train: MG_TRAIN_STEPS - opts.washout_rows,
        eval: 0,
    };
    let system = ReservoirSystem::new(cell.reservoir_config(phases, seed_value))?;
    let mut obs_rng = seed::rng(seed_value, &[seed::tags::OBSERVATION]);
    let state = system.initial_state()?;
    let (matrix, state) = system.run_from(state, &stream.inputs[..MG_TRAIN_STEPS], &mut obs_rng)?;

    let mut train = matrix.train_block();
    if opts.train_noise > 0.0 {
        let mut noise_rng = seed::rng(seed_value, &[seed::tags::TRAIN_NOISE]);
        for r in 0..train.nrows() {
            for c in 1..train.ncols() {
                train[(r, c)] += noise_rng.random_range(-opts.train_noise..=opts.train_noise);
            }
        }
    }
    let tr = phases.train_range();
    let targets = &stream.targets[0].values;
    let w = DesignFactor::new(&train)?.solve(&targets[tr])?;

    let last = matrix.data().row(MG_TRAIN_STEPS - 1);
    let carry: f64 = last.iter().zip(w.weights.iter()).map(|(x, wi)| x * wi).sum();
    let carry = carry.clamp(0.0, 1.0);

    let reference = match closed_outputs(&system, &w, state.clone(), carry)? {
        Some(outputs) => outputs,
        None => {
            return Ok(MgSample {
                closed_nmse: None,
                lambda: None,
                diverged: true,
            })
        }
    };
    let twin_carry = (carry + opts.perturbation).clamp(0.0, 1.0);
    let twin = closed_outputs(&system, &w, state, twin_carry)?;

    let closed_nmse = Some(nmse(&reference, &targets[MG_TRAIN_STEPS..])?);
    let lambda = twin.and_then(|t| {
        lyapunov_estimate(&reference, &t, LYAPUNOV_WINDOW, LYAPUNOV_HORIZON).ok()
    });
    Ok(MgSample {
        closed_nmse,
        lambda,
        diverged: false,
    })
}

#[derive(Serialize)]
struct CellResult {
    cell: Cell,
    ok_samples: usize,
    diverged: usize,
    /// Samples with closed-loop error under 0.1 and a positive divergence
    /// rate, the qualification used by the headline benchmark.
    chaotic_successes: usize,
    nmse: MetricStats,
    lambda: MetricStats,
    samples: Vec<MgSample>,
    failures: Vec<SampleFailure>,
}

#[derive(Serialize)]
struct Summary<'a> {
    experiment: &'static str,
    seed_lineage: &'static str,
    options: MgOptions,
    config: &'a ExperimentConfig,
    cells: Vec<CellResult>,
}

pub fn run(config: &ExperimentConfig, out: &OutDir) -> Result<i32, CliError> {
    let cells = enumerate_cells(&config.grid);
    let opts = config.mg;
    let units = sweep::units(cells.len(), config.samples, |c| cells[c].physical_index);
    let outcomes = sweep::parallel_map(&units, |u| {
        let seed_value = sample_seed(config.seed, u.physical, u.sample);
        mg_sample(&cells[u.cell].params, &opts, seed_value).map_err(|e| e.to_string())
    });
    let (per_cell, cell_seconds) = sweep::by_cell(outcomes, cells.len(), config.samples);

    let mut results = Vec::with_capacity(cells.len());
    let mut csv_rows = Vec::with_capacity(cells.len());
    for (cell, samples) in cells.iter().zip(per_cell) {
        let (ok, failures) = output::collect_samples(samples);
        let diverged = ok.iter().filter(|s| s.diverged).count();
        let chaotic_successes = ok
            .iter()
            .filter(|s| {
                s.closed_nmse.is_some_and(|e| e < 0.1) && s.lambda.is_some_and(|l| l > 0.0)
            })
            .count();
        let nmse_stats =
            MetricStats::from_samples(ok.iter().filter_map(|s| s.closed_nmse).collect());
        let lambda_stats = MetricStats::from_samples(ok.iter().filter_map(|s| s.lambda).collect());
        let mut row = cell.params.csv_fields();
        row.extend([
            ok.len().to_string(),
            failures.len().to_string(),
            diverged.to_string(),
            chaotic_successes.to_string(),
            nmse_stats.mean.to_string(),
            nmse_stats.std.to_string(),
            lambda_stats.mean.to_string(),
            lambda_stats.std.to_string(),
        ]);
        csv_rows.push(row);
        results.push(CellResult {
            cell: cell.clone(),
            ok_samples: ok.len(),
            diverged,
            chaotic_successes,
            nmse: nmse_stats,
            lambda: lambda_stats,
            samples: ok,
            failures,
        });
    }

    let mut header = cell_csv_header();
    header.extend(
        [
            "ok_samples",
            "failed_samples",
            "diverged",
            "chaotic_successes",
            "closed_nmse_mean",
            "closed_nmse_std",
            "lambda_mean",
            "lambda_std",
        ]
        .map(String::from),
    );
    out.write_csv("curve.csv", &header, &csv_rows)?;
    out.write_json(
        "summary.json",
        &Summary {
            experiment: "mg",
            seed_lineage: SEED_LINEAGE,
            options: opts,
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
        let stream = mackey_glass_stream(opts.tau_mg, MG_DEFAULT_TOTAL)?;
        let phases = Phases {
            washout: opts.washout_rows,
            train: MG_TRAIN_STEPS - opts.washout_rows,
            eval: 0,
        };
        let system = ReservoirSystem::new(cell.params.reservoir_config(phases, seed_value))?;
        let mut obs_rng = seed::rng(seed_value, &[seed::tags::OBSERVATION]);
        let state = system.initial_state()?;
        let (matrix, _) = system.run_from(state, &stream.inputs[..MG_TRAIN_STEPS], &mut obs_rng)?;
        #[derive(Serialize)]
        struct Provenance<'a> {
            cell: &'a Cell,
            sample: usize,
            seed: u64,
            stream: &'a str,
        }
        output::write_signals(
            out,
            &matrix,
            &stream.inputs[..MG_TRAIN_STEPS],
            &Provenance {
                cell,
                sample: 0,
                seed: seed_value,
                stream: &stream.name,
            },
        )?;
    }
    Ok(0)
}
