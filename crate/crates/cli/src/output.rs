use std::path::Path;

use powreg_core::bench::{AgreementRow, RatioRow, RatioSummary};
use serde::Serialize;

use crate::commands::CliError;

/// Writes `rows` with a header row. An empty iterator still gets the header,
/// which `csv` only emits on the first record, so it is written by hand.
pub fn write_csv<R: Serialize + HeaderOnly>(
    path: &Path,
    rows: impl IntoIterator<Item = R>,
) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    let mut any = false;
    for r in rows {
        w.serialize(r)?;
        any = true;
    }
    if !any {
        w.write_record(R::HEADER)?;
    }
    w.flush().map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

pub trait HeaderOnly {
    const HEADER: &'static [&'static str];
}

macro_rules! header {
    ($t:ty, [$($f:literal),* $(,)?]) => {
        impl HeaderOnly for $t {
            const HEADER: &'static [&'static str] = &[$($f),*];
        }
    };
}

#[derive(Serialize)]
pub struct CurveCsvRow {
    pub b: f64,
    pub q: f64,
    pub omega: f64,
    pub h: f64,
}
header!(CurveCsvRow, ["b", "q", "omega", "h"]);

#[derive(Serialize)]
pub struct CoefRow {
    pub dataset: String,
    pub strategy: String,
    pub ordering_seed: Option<u64>,
    pub omega: f64,
    pub q: f64,
    pub coefficient_index: usize,
    pub value: f64,
}
header!(
    CoefRow,
    [
        "dataset",
        "strategy",
        "ordering_seed",
        "omega",
        "q",
        "coefficient_index",
        "value"
    ]
);

#[derive(Serialize, Clone)]
pub struct PathRow {
    pub omega: f64,
    pub q: f64,
    pub objective: f64,
    pub sweeps: usize,
    pub updates: u64,
    pub converged: bool,
    pub nonzero: usize,
}
header!(
    PathRow,
    [
        "omega",
        "q",
        "objective",
        "sweeps",
        "updates",
        "converged",
        "nonzero"
    ]
);

#[derive(Serialize)]
pub struct CellRow {
    pub omega: f64,
    pub q: f64,
    pub objective: f64,
    pub updates: u64,
    pub converged: bool,
    pub nonzero: usize,
}
header!(
    CellRow,
    ["omega", "q", "objective", "updates", "converged", "nonzero"]
);

#[derive(Serialize)]
pub struct BenchRecordRow {
    pub dataset: String,
    pub strategy: String,
    pub ordering_seed: u64,
    pub wall_time_s: f64,
    pub total_updates: u64,
    pub nonconverged_cells: usize,
}
header!(
    BenchRecordRow,
    [
        "dataset",
        "strategy",
        "ordering_seed",
        "wall_time_s",
        "total_updates",
        "nonconverged_cells"
    ]
);

#[derive(Serialize)]
pub struct BenchCellRow {
    pub dataset: String,
    pub strategy: String,
    pub ordering_seed: u64,
    pub omega: f64,
    pub q: f64,
    pub objective: f64,
    pub converged: bool,
}
header!(
    BenchCellRow,
    [
        "dataset",
        "strategy",
        "ordering_seed",
        "omega",
        "q",
        "objective",
        "converged"
    ]
);

#[derive(Serialize)]
pub struct RatioCsvRow {
    pub dataset: String,
    pub ordering_seed: u64,
    pub algorithm: &'static str,
    pub warm_wall_s: f64,
    pub cold_wall_s: f64,
    pub wall_ratio: f64,
    pub warm_updates: u64,
    pub cold_updates: u64,
    pub update_ratio: f64,
}
header!(
    RatioCsvRow,
    [
        "dataset",
        "ordering_seed",
        "algorithm",
        "warm_wall_s",
        "cold_wall_s",
        "wall_ratio",
        "warm_updates",
        "cold_updates",
        "update_ratio",
    ]
);

impl From<&RatioRow> for RatioCsvRow {
    fn from(r: &RatioRow) -> Self {
        Self {
            dataset: r.dataset.clone(),
            ordering_seed: r.ordering_seed,
            algorithm: r.algorithm.name(),
            warm_wall_s: r.warm_wall_s,
            cold_wall_s: r.cold_wall_s,
            wall_ratio: r.wall_ratio,
            warm_updates: r.warm_updates,
            cold_updates: r.cold_updates,
            update_ratio: r.update_ratio,
        }
    }
}

#[derive(Serialize)]
pub struct SummaryCsvRow {
    pub dataset: String,
    pub algorithm: &'static str,
    pub orderings: usize,
    pub mean_wall_ratio: f64,
    pub max_wall_ratio: f64,
    pub mean_update_ratio: f64,
    pub max_update_ratio: f64,
}
header!(
    SummaryCsvRow,
    [
        "dataset",
        "algorithm",
        "orderings",
        "mean_wall_ratio",
        "max_wall_ratio",
        "mean_update_ratio",
        "max_update_ratio",
    ]
);

impl From<&RatioSummary> for SummaryCsvRow {
    fn from(s: &RatioSummary) -> Self {
        Self {
            dataset: s.dataset.clone(),
            algorithm: s.algorithm.name(),
            orderings: s.orderings,
            mean_wall_ratio: s.mean_wall_ratio,
            max_wall_ratio: s.max_wall_ratio,
            mean_update_ratio: s.mean_update_ratio,
            max_update_ratio: s.max_update_ratio,
        }
    }
}

/// One row per (dataset, strategy). `aggregation` is always `per_cell`: each
/// lattice cell is compared with the best objective at that cell.
#[derive(Serialize)]
pub struct AgreementCsvRow {
    pub dataset: String,
    pub strategy: &'static str,
    pub aggregation: &'static str,
    pub tolerance: f64,
    pub cells: usize,
    pub agreeing: usize,
    pub proportion: f64,
    pub convex_cells: usize,
    pub convex_proportion: f64,
    pub nonconvex_cells: usize,
    pub nonconvex_proportion: f64,
}
header!(
    AgreementCsvRow,
    [
        "dataset",
        "strategy",
        "aggregation",
        "tolerance",
        "cells",
        "agreeing",
        "proportion",
        "convex_cells",
        "convex_proportion",
        "nonconvex_cells",
        "nonconvex_proportion",
    ]
);

impl AgreementCsvRow {
    pub fn new(r: &AgreementRow, tolerance: f64) -> Self {
        Self {
            dataset: r.dataset.clone(),
            strategy: r.strategy.name(),
            aggregation: "per_cell",
            tolerance,
            cells: r.cells,
            agreeing: r.agreeing,
            proportion: r.proportion,
            convex_cells: r.convex_cells,
            convex_proportion: r.convex_proportion(),
            nonconvex_cells: r.nonconvex_cells,
            nonconvex_proportion: r.nonconvex_proportion(),
        }
    }
}
