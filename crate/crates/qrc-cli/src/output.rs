//! Result persistence: JSON summaries, CSV curves, optional signal dumps,
//! and the wall-time sidecar. summary.json and curve.csv are byte-identical
//! for a given (config, master seed) regardless of worker count; timings go
//! to a separate file because they are not.

use crate::error::CliError;
use qrc_core::tasks::{CapacityCurve, SampleCapacities};
use serde::Serialize;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

pub struct OutDir {
    path: PathBuf,
}

impl OutDir {
    pub fn create(path: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(path)
            .map_err(|e| CliError::Io(format!("cannot create {}: {e}", path.display())))?;
        Ok(OutDir {
            path: path.to_path_buf(),
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<PathBuf, CliError> {
        let path = self.path.join(name);
        let file = File::create(&path)
            .map_err(|e| CliError::Io(format!("cannot create {}: {e}", path.display())))?;
        let mut w = BufWriter::new(file);
        serde_json::to_writer_pretty(&mut w, value)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
        w.write_all(b"\n")
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
        Ok(path)
    }

    pub fn write_csv(&self, name: &str, header: &[String], rows: &[Vec<String>]) -> Result<PathBuf, CliError> {
        let path = self.path.join(name);
        let mut w = csv::Writer::from_path(&path)
            .map_err(|e| CliError::Io(format!("cannot create {}: {e}", path.display())))?;
        w.write_record(header)
            .and_then(|_| rows.iter().try_for_each(|r| w.write_record(r)))
            .and_then(|_| w.flush().map_err(csv::Error::from))
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
        Ok(path)
    }
}

/// One failed (cell, sample) unit; sweeps record these and continue.
#[derive(Debug, Clone, Serialize)]
pub struct SampleFailure {
    pub sample: usize,
    pub error: String,
}

/// Serialized view of a capacity aggregate.
#[derive(Debug, Clone, Serialize)]
pub struct CurveStats {
    pub mean: f64,
    pub std: f64,
    pub per_sample: Vec<f64>,
    pub per_delay_mean: Vec<f64>,
    pub per_delay_std: Vec<f64>,
}

impl From<&CapacityCurve> for CurveStats {
    fn from(c: &CapacityCurve) -> Self {
        CurveStats {
            mean: c.capacity_mean,
            std: c.capacity_std,
            per_sample: c.per_sample.clone(),
            per_delay_mean: c.per_delay_mean.clone(),
            per_delay_std: c.per_delay_std.clone(),
        }
    }
}

/// Mean and sample standard deviation of a metric over samples.
#[derive(Debug, Clone, Serialize)]
pub struct MetricStats {
    pub mean: f64,
    pub std: f64,
    pub per_sample: Vec<f64>,
}

impl MetricStats {
    pub fn from_samples(per_sample: Vec<f64>) -> Self {
        let n = per_sample.len().max(1) as f64;
        let mean = per_sample.iter().sum::<f64>() / n;
        let std = qrc_core::tasks::sample_std(&per_sample, mean);
        MetricStats {
            mean,
            std,
            per_sample,
        }
    }
}

/// Split unit results into capacities and recorded failures, preserving
/// sample order.
pub fn collect_samples<T>(results: Vec<Result<T, String>>) -> (Vec<T>, Vec<SampleFailure>) {
    let mut ok = Vec::with_capacity(results.len());
    let mut failures = Vec::new();
    for (sample, r) in results.into_iter().enumerate() {
        match r {
            Ok(v) => ok.push(v),
            Err(error) => failures.push(SampleFailure { sample, error }),
        }
    }
    (ok, failures)
}

/// Aggregate per-sample capacity curves (already filtered to successes).
pub fn aggregate(samples: &[SampleCapacities], tau_b_max: usize) -> CapacityCurve {
    qrc_core::tasks::aggregate_curves(samples, tau_b_max)
}

/// Wall-clock sidecar: seconds per cell, summed over that cell's samples.
#[derive(Debug, Serialize)]
pub struct Timings {
    pub total_seconds: f64,
    pub cell_seconds: Vec<f64>,
}

/// Dump one signal matrix with its driving inputs as signals.csv plus a
/// provenance sidecar.
pub fn write_signals(
    out: &OutDir,
    matrix: &qrc_core::SignalMatrix,
    inputs: &[f64],
    provenance: &impl Serialize,
) -> Result<(), CliError> {
    let mut header = vec!["step".to_string(), "input".to_string(), "bias".to_string()];
    for v in 1..=matrix.virtual_nodes() {
        for q in 1..=matrix.n_qubits() {
            header.push(format!("q{q}v{v}"));
        }
    }
    let mut rows = Vec::with_capacity(matrix.rows());
    for r in 0..matrix.rows() {
        let mut row = Vec::with_capacity(header.len());
        row.push(r.to_string());
        row.push(inputs[r].to_string());
        for c in 0..matrix.cols() {
            row.push(matrix.data()[(r, c)].to_string());
        }
        rows.push(row);
    }
    out.write_csv("signals.csv", &header, &rows)?;
    out.write_json("signals.json", provenance)?;
    Ok(())
}
