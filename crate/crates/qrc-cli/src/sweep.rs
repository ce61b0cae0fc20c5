//! Deterministic parallel execution over independent (cell, sample) units.
//! Results come back in unit order regardless of worker count, so every
//! reduction downstream is order-stable.

use rayon::prelude::*;
use std::time::Instant;

/// One schedulable unit of work.
#[derive(Debug, Clone, Copy)]
pub struct Unit {
    /// Output-ordering cell index.
    pub cell: usize,
    /// Seed-lineage cell index (may coincide with `cell`).
    pub physical: usize,
    pub sample: usize,
}

/// All (cell, sample) pairs of a sweep, cell-major.
pub fn units(n_cells: usize, samples: usize, physical_of: impl Fn(usize) -> usize) -> Vec<Unit> {
    let mut out = Vec::with_capacity(n_cells * samples);
    for cell in 0..n_cells {
        let physical = physical_of(cell);
        for sample in 0..samples {
            out.push(Unit {
                cell,
                physical,
                sample,
            });
        }
    }
    out
}

/// Run `f` over every unit on the current rayon pool. Returns, in unit order,
/// each outcome plus its wall time in seconds.
pub fn parallel_map<T, F>(units: &[Unit], f: F) -> Vec<(Result<T, String>, f64)>
where
    T: Send,
    F: Fn(&Unit) -> Result<T, String> + Sync,
{
    units
        .par_iter()
        .map(|u| {
            let start = Instant::now();
            let result = f(u);
            (result, start.elapsed().as_secs_f64())
        })
        .collect()
}

/// Group ordered unit outcomes back into per-cell vectors of `samples` each,
/// separating wall times.
pub fn by_cell<T>(
    outcomes: Vec<(Result<T, String>, f64)>,
    n_cells: usize,
    samples: usize,
) -> (Vec<Vec<Result<T, String>>>, Vec<f64>) {
    assert_eq!(outcomes.len(), n_cells * samples);
    let mut cells: Vec<Vec<Result<T, String>>> = Vec::with_capacity(n_cells);
    let mut seconds = vec![0.0; n_cells];
    let mut iter = outcomes.into_iter();
    for cell in 0..n_cells {
        let mut bucket = Vec::with_capacity(samples);
        for _ in 0..samples {
            let (result, secs) = iter.next().expect("unit count");
            seconds[cell] += secs;
            bucket.push(result);
        }
        cells.push(bucket);
    }
    (cells, seconds)
}
