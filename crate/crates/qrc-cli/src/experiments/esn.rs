//! Classical echo-state baseline: the same delay benchmark over a spectral
//! radius grid, per input convention.

use crate::config::{sample_seed, EsnCaseChoice, ExperimentConfig, SEED_LINEAGE};
use crate::error::CliError;
use crate::output::{self, CurveStats, OutDir, SampleFailure, Timings};
use crate::sweep;
use qrc_core::esn::{best_radius_index, esn_capacity_sample, radius_result, EsnRadiusResult};
use qrc_core::tasks::SampleCapacities;
use serde::Serialize;

#[derive(Serialize)]
struct RadiusSummary {
    radius: f64,
    ok_samples: usize,
    stm: CurveStats,
    pc: CurveStats,
    total_per_sample: Vec<f64>,
    total_mean: f64,
    total_std: f64,
    failures: Vec<SampleFailure>,
}

#[derive(Serialize)]
struct CaseSummary {
    case: EsnCaseChoice,
    best_radius: f64,
    best_total_mean: f64,
    radii: Vec<RadiusSummary>,
}

#[derive(Serialize)]
struct Summary<'a> {
    experiment: &'static str,
    /// The radius index stands in for the physical cell; the input case is
    /// deliberately absent so both cases see identical draws.
    seed_lineage: &'static str,
    n_nodes: usize,
    config: &'a ExperimentConfig,
    cases: Vec<CaseSummary>,
}

pub fn run(config: &ExperimentConfig, out: &OutDir) -> Result<i32, CliError> {
    let radii = config.radius_grid();
    let cases = &config.esn.cases;
    let n_nodes = config.esn.n_nodes;
    let tau_b_max = config.capacity.tau_b_max;
    let phases = config.phases.phases();
    let n_cells = cases.len() * radii.len();
    let units = sweep::units(n_cells, config.samples, |c| c % radii.len());
    let outcomes = sweep::parallel_map(&units, |u| {
        let case = cases[u.cell / radii.len()];
        let radius = radii[u.physical];
        let seed = sample_seed(config.seed, u.physical, u.sample);
        esn_capacity_sample(n_nodes, radius, case.into(), seed, tau_b_max, phases)
            .map_err(|e| e.to_string())
    });
    let (per_cell, cell_seconds) = sweep::by_cell(outcomes, n_cells, config.samples);

    let mut case_summaries = Vec::with_capacity(cases.len());
    let mut csv_rows = Vec::with_capacity(n_cells);
    let mut per_cell = per_cell.into_iter();
    for &case in cases {
        let mut results: Vec<EsnRadiusResult> = Vec::with_capacity(radii.len());
        let mut radius_rows = Vec::with_capacity(radii.len());
        for &radius in &radii {
            let samples = per_cell.next().expect("cell count");
            let (ok, failures) = output::collect_samples(samples);
            let (stm, pc): (Vec<SampleCapacities>, Vec<SampleCapacities>) = ok.into_iter().unzip();
            let ok_samples = stm.len();
            let r = radius_result(radius, stm, pc, tau_b_max);
            csv_rows.push(vec![
                case.to_string(),
                radius.to_string(),
                ok_samples.to_string(),
                failures.len().to_string(),
                r.stm.capacity_mean.to_string(),
                r.stm.capacity_std.to_string(),
                r.pc.capacity_mean.to_string(),
                r.pc.capacity_std.to_string(),
                r.total_mean.to_string(),
                r.total_std.to_string(),
            ]);
            radius_rows.push(RadiusSummary {
                radius,
                ok_samples,
                stm: CurveStats::from(&r.stm),
                pc: CurveStats::from(&r.pc),
                total_per_sample: r.total_per_sample.clone(),
                total_mean: r.total_mean,
                total_std: r.total_std,
                failures,
            });
            results.push(r);
        }
        let best = best_radius_index(&results);
        case_summaries.push(CaseSummary {
            case,
            best_radius: results[best].radius,
            best_total_mean: results[best].total_mean,
            radii: radius_rows,
        });
    }

    let header: Vec<String> = [
        "case",
        "radius",
        "ok_samples",
        "failed_samples",
        "stm_mean",
        "stm_std",
        "pc_mean",
        "pc_std",
        "total_mean",
        "total_std",
    ]
    .map(String::from)
    .to_vec();
    out.write_csv("curve.csv", &header, &csv_rows)?;
    out.write_json(
        "summary.json",
        &Summary {
            experiment: "esn",
            seed_lineage: SEED_LINEAGE,
            n_nodes,
            config,
            cases: case_summaries,
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
        eprintln!("note: --dump-signals applies to reservoir runs; the esn subcommand has no signal matrix to dump");
    }
    Ok(0)
}
