//! Nonlinear autoregressive benchmark: five recursion orders scored against
//! a direct linear regression on the same input stream.

use crate::config::{
    cell_csv_header, enumerate_cells, sample_seed, Cell, ExperimentConfig, NarmaInputChoice,
    SEED_LINEAGE,
};
use crate::error::CliError;
use crate::output::{self, MetricStats, OutDir, SampleFailure, Timings};
use crate::sweep;
use nalgebra::DMatrix;
use qrc_core::readout::{nmse, predict_batch, DesignFactor};
use qrc_core::tasks::{linear_regression_baseline, narma_suite_stream, NARMA_ORDERS};
use qrc_core::ReservoirSystem;
use serde::Serialize;

/// Per-sample scores, one entry per recursion order.
pub struct NarmaSample {
    pub qr_nmse: Vec<f64>,
    pub lr_nmse: Vec<f64>,
}

/// Drive one reservoir over the suite stream and score every target with a
/// shared design factorization, next to the direct linear baseline.
pub fn narma_sample(
    cell: &crate::config::CellParams,
    input: NarmaInputChoice,
    seed: u64,
) -> Result<NarmaSample, qrc_core::CoreError> {
    let stream = narma_suite_stream(input.into(), seed)?;
    let system = ReservoirSystem::new(cell.reservoir_config(stream.phases, seed))?;
    let matrix = system.run(&stream.inputs)?;
    let tr = stream.phases.train_range();
    let ev = stream.phases.eval_range();
    let factor = DesignFactor::new(&matrix.train_block())?;
    let mut train_targets = DMatrix::zeros(tr.len(), stream.targets.len());
    for (t, series) in stream.targets.iter().enumerate() {
        for (r, k) in tr.clone().enumerate() {
            train_targets[(r, t)] = series.values[k];
        }
    }
    let batch = factor.solve_batch(&train_targets)?;
    let preds = predict_batch(&matrix.eval_block(), &batch)?;
    let mut qr_nmse = Vec::with_capacity(stream.targets.len());
    let mut lr_nmse = Vec::with_capacity(stream.targets.len());
    for (t, series) in stream.targets.iter().enumerate() {
        let outputs: Vec<f64> = preds.column(t).iter().copied().collect();
        qr_nmse.push(nmse(&outputs, &series.values[ev.clone()])?);
        lr_nmse.push(linear_regression_baseline(&stream, t)?.nmse);
    }
    Ok(NarmaSample { qr_nmse, lr_nmse })
}

#[derive(Serialize)]
struct TaskResult {
    task: String,
    qr: MetricStats,
    lr: MetricStats,
    /// Samples where the reservoir beat the linear baseline.
    qr_wins: usize,
}

#[derive(Serialize)]
struct CellResult {
    cell: Cell,
    ok_samples: usize,
    tasks: Vec<TaskResult>,
    failures: Vec<SampleFailure>,
}

#[derive(Serialize)]
struct Summary<'a> {
    experiment: &'static str,
    seed_lineage: &'static str,
    input: NarmaInputChoice,
    config: &'a ExperimentConfig,
    cells: Vec<CellResult>,
}

pub fn run(config: &ExperimentConfig, out: &OutDir) -> Result<i32, CliError> {
    let cells = enumerate_cells(&config.grid);
    let input = config.narma.input;
    let units = sweep::units(cells.len(), config.samples, |c| cells[c].physical_index);
    let outcomes = sweep::parallel_map(&units, |u| {
        let seed = sample_seed(config.seed, u.physical, u.sample);
        narma_sample(&cells[u.cell].params, input, seed).map_err(|e| e.to_string())
    });
    let (per_cell, cell_seconds) = sweep::by_cell(outcomes, cells.len(), config.samples);

    let mut results = Vec::with_capacity(cells.len());
    let mut csv_rows = Vec::new();
    for (cell, samples) in cells.iter().zip(per_cell) {
        let (ok, failures) = output::collect_samples(samples);
        let mut tasks = Vec::with_capacity(NARMA_ORDERS.len());
        for (t, order) in NARMA_ORDERS.iter().enumerate() {
            let qr: Vec<f64> = ok.iter().map(|s| s.qr_nmse[t]).collect();
            let lr: Vec<f64> = ok.iter().map(|s| s.lr_nmse[t]).collect();
            let qr_wins = qr.iter().zip(&lr).filter(|(q, l)| q < l).count();
            let qr = MetricStats::from_samples(qr);
            let lr = MetricStats::from_samples(lr);
            let mut row = cell.params.csv_fields();
            row.extend([
                format!("narma{order}"),
                ok.len().to_string(),
                failures.len().to_string(),
                qr.mean.to_string(),
                qr.std.to_string(),
                lr.mean.to_string(),
                lr.std.to_string(),
                qr_wins.to_string(),
            ]);
            csv_rows.push(row);
            tasks.push(TaskResult {
                task: format!("narma{order}"),
                qr,
                lr,
                qr_wins,
            });
        }
        results.push(CellResult {
            cell: cell.clone(),
            ok_samples: ok.len(),
            tasks,
            failures,
        });
    }

    let mut header = cell_csv_header();
    header.extend(
        [
            "task",
            "ok_samples",
            "failed_samples",
            "qr_nmse_mean",
            "qr_nmse_std",
            "lr_nmse_mean",
            "lr_nmse_std",
            "qr_wins",
        ]
        .map(String::from),
    );
    out.write_csv("curve.csv", &header, &csv_rows)?;
    out.write_json(
        "summary.json",
        &Summary {
            experiment: "narma",
            seed_lineage: SEED_LINEAGE,
            input,
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
        let seed = sample_seed(config.seed, cell.physical_index, 0);
        let stream = narma_suite_stream(input.into(), seed)?;
        let system = ReservoirSystem::new(cell.params.reservoir_config(stream.phases, seed))?;
        let matrix = system.run(&stream.inputs)?;
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
            &stream.inputs,
            &Provenance {
                cell,
                sample: 0,
                seed,
                stream: &stream.name,
            },
        )?;
    }
    Ok(0)
}
