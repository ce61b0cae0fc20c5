//! Memory (delay reproduction) and parity capacity sweeps over the quantum
//! reservoir grid. Each sample scores both task families from one run.

use crate::config::{cell_csv_header, enumerate_cells, sample_seed, Cell, ExperimentConfig, SEED_LINEAGE};
use crate::error::CliError;
use crate::output::{self, CurveStats, OutDir, SampleFailure, Timings};
use crate::sweep;
use qrc_core::tasks::{capacity_pair_sample, SampleCapacities};
use serde::Serialize;

#[derive(Serialize)]
struct CellResult {
    cell: Cell,
    ok_samples: usize,
    stm: CurveStats,
    pc: CurveStats,
    failures: Vec<SampleFailure>,
}

#[derive(Serialize)]
struct Summary<'a> {
    experiment: &'static str,
    seed_lineage: &'static str,
    tau_b_max: usize,
    config: &'a ExperimentConfig,
    cells: Vec<CellResult>,
}

pub fn run(config: &ExperimentConfig, out: &OutDir) -> Result<i32, CliError> {
    let cells = enumerate_cells(&config.grid);
    let tau_b_max = config.capacity.tau_b_max;
    let phases = config.phases.phases();
    let units = sweep::units(cells.len(), config.samples, |c| cells[c].physical_index);
    let outcomes = sweep::parallel_map(&units, |u| {
        let seed = sample_seed(config.seed, u.physical, u.sample);
        let rc = cells[u.cell].params.reservoir_config(phases, seed);
        capacity_pair_sample(&rc, tau_b_max).map_err(|e| e.to_string())
    });
    let (per_cell, cell_seconds) = sweep::by_cell(outcomes, cells.len(), config.samples);

    let mut results = Vec::with_capacity(cells.len());
    let mut csv_rows = Vec::with_capacity(cells.len());
    for (cell, samples) in cells.iter().zip(per_cell) {
        let (ok, failures) = output::collect_samples(samples);
        let (stm_samples, pc_samples): (Vec<SampleCapacities>, Vec<SampleCapacities>) =
            ok.into_iter().unzip();
        let stm = output::aggregate(&stm_samples, tau_b_max);
        let pc = output::aggregate(&pc_samples, tau_b_max);
        let total_mean = stm.capacity_mean + pc.capacity_mean;
        let mut row = cell.params.csv_fields();
        row.extend([
            stm_samples.len().to_string(),
            failures.len().to_string(),
            stm.capacity_mean.to_string(),
            stm.capacity_std.to_string(),
            pc.capacity_mean.to_string(),
            pc.capacity_std.to_string(),
            total_mean.to_string(),
        ]);
        csv_rows.push(row);
        results.push(CellResult {
            cell: cell.clone(),
            ok_samples: stm_samples.len(),
            stm: CurveStats::from(&stm),
            pc: CurveStats::from(&pc),
            failures,
        });
    }

    let mut header = cell_csv_header();
    header.extend(
        [
            "ok_samples",
            "failed_samples",
            "stm_mean",
            "stm_std",
            "pc_mean",
            "pc_std",
            "total_mean",
        ]
        .map(String::from),
    );
    out.write_csv("curve.csv", &header, &csv_rows)?;
    out.write_json(
        "summary.json",
        &Summary {
            experiment: "capacity",
            seed_lineage: SEED_LINEAGE,
            tau_b_max,
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
        dump_first_cell(config, out, &cells)?;
    }
    Ok(0)
}

fn dump_first_cell(config: &ExperimentConfig, out: &OutDir, cells: &[Cell]) -> Result<(), CliError> {
    let cell = &cells[0];
    let seed = sample_seed(config.seed, cell.physical_index, 0);
    let rc = cell.params.reservoir_config(config.phases.phases(), seed);
    let (matrix, inputs) = qrc_core::tasks::run_binary_drive(&rc)?;
    #[derive(Serialize)]
    struct Provenance<'a> {
        cell: &'a Cell,
        sample: usize,
        seed: u64,
    }
    output::write_signals(
        out,
        &matrix,
        &inputs,
        &Provenance {
            cell,
            sample: 0,
            seed,
        },
    )
}
