//! Warm versus cold benchmark over random coordinate orderings.
//!
//! Every strategy runs on the same `(ω, q)` lattice for each ordering.
//! Cost is reported both as wall time and as total coordinate updates; only
//! the update counts are reproducible across machines.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{PowregError, Result};
use crate::path::{
    base_omega_grid, surface, QGrid, Strategy, DEFAULT_K_OMEGA, DEFAULT_K_Q, DEFAULT_OMEGA_FLOOR,
    DEFAULT_Q_LAST,
};
use crate::problem::ProblemInstance;
use crate::solver::SolveConfig;

pub const DEFAULT_AGREEMENT_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub n_orderings: usize,
    pub base_seed: u64,
    pub k_omega: usize,
    pub omega_floor: f64,
    pub k_q: usize,
    pub q_last: f64,
    pub agreement_tol: f64,
    /// The ordering field is replaced per run.
    pub solve: SolveConfig,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            n_orderings: 10,
            base_seed: 20_231_001,
            k_omega: DEFAULT_K_OMEGA,
            omega_floor: DEFAULT_OMEGA_FLOOR,
            k_q: DEFAULT_K_Q,
            q_last: DEFAULT_Q_LAST,
            agreement_tol: DEFAULT_AGREEMENT_TOL,
            solve: SolveConfig::default(),
        }
    }
}

/// Fisher–Yates permutation of `0..p` from a ChaCha8 stream seeded with `seed`.
pub fn ordering_from_seed(p: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..p).collect();
    order.shuffle(&mut rng);
    order
}

fn factorial_at_least(p: usize, n: usize) -> bool {
    let mut f = 1usize;
    for k in 2..=p {
        f = f.saturating_mul(k);
        if f >= n {
            return true;
        }
    }
    f >= n
}

/// Up to `n` distinct orderings with the seeds that produced them. Seeds are
/// `base_seed, base_seed + 1, …`; duplicates are skipped. Fewer than `n` are
/// returned only when `p! < n`.
pub fn unique_orderings(p: usize, n: usize, base_seed: u64) -> Vec<(u64, Vec<usize>)> {
    let target = if factorial_at_least(p, n) {
        n
    } else {
        (1..=p).product()
    };
    let mut out: Vec<(u64, Vec<usize>)> = Vec::with_capacity(target);
    let mut seed = base_seed;
    while out.len() < target {
        let order = ordering_from_seed(p, seed);
        if !out.iter().any(|(_, o)| *o == order) {
            out.push((seed, order));
        }
        seed = seed.wrapping_add(1);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellObjective {
    pub omega: f64,
    pub q: f64,
    pub objective: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub dataset: String,
    pub strategy: Strategy,
    pub ordering_seed: u64,
    pub wall_time_s: f64,
    pub total_updates: u64,
    pub nonconverged_cells: usize,
    pub cells: Vec<CellObjective>,
}

/// The lattice every strategy shares: the base ω grid and the q grid.
pub fn bench_lattice(
    problem: &ProblemInstance,
    config: &BenchConfig,
) -> Result<(crate::path::OmegaGrid, QGrid)> {
    let omegas = base_omega_grid(problem, config.k_omega, config.omega_floor)?;
    let qs = QGrid::equispaced(config.k_q, config.q_last)?;
    Ok((omegas, qs))
}

fn run_one(
    dataset: &str,
    problem: &ProblemInstance,
    lattice: &(crate::path::OmegaGrid, QGrid),
    strategy: Strategy,
    seed: u64,
    ordering: &[usize],
    config: &BenchConfig,
) -> Result<BenchRecord> {
    let solve = config.solve.clone().with_ordering(ordering.to_vec());
    let start = Instant::now();
    let result = surface(problem, &lattice.0, &lattice.1, strategy, &solve)?;
    let wall = start.elapsed().as_secs_f64().max(1e-9);
    Ok(BenchRecord {
        dataset: dataset.to_owned(),
        strategy,
        ordering_seed: seed,
        wall_time_s: wall,
        total_updates: result.total_updates,
        nonconverged_cells: result.nonconverged(),
        cells: result
            .cells
            .iter()
            .map(|c| CellObjective {
                omega: c.omega,
                q: c.q,
                objective: c.objective,
                converged: c.converged,
            })
            .collect(),
    })
}

/// Runs all four strategies for every ordering. Records come back ordered
/// by ordering, then strategy, regardless of how the work was scheduled.
pub fn bench_dataset(
    dataset: &str,
    problem: &ProblemInstance,
    config: &BenchConfig,
) -> Result<Vec<BenchRecord>> {
    if config.n_orderings == 0 {
        return Err(PowregError::InvalidConfig(
            "n_orderings must be >= 1".into(),
        ));
    }
    let lattice = bench_lattice(problem, config)?;
    let orderings = unique_orderings(problem.p(), config.n_orderings, config.base_seed);
    let tasks: Vec<(u64, &[usize], Strategy)> = orderings
        .iter()
        .flat_map(|(seed, order)| Strategy::ALL.map(|s| (*seed, order.as_slice(), s)))
        .collect();

    let run = |&(seed, order, strategy): &(u64, &[usize], Strategy)| {
        run_one(dataset, problem, &lattice, strategy, seed, order, config)
    };

    #[cfg(feature = "parallel")]
    let records: Vec<Result<BenchRecord>> = {
        use rayon::prelude::*;
        tasks.par_iter().map(run).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let records: Vec<Result<BenchRecord>> = tasks.iter().map(run).collect();

    records.into_iter().collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Algorithm {
    FixedQ,
    FixedOmega,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::FixedQ => "fixed_q",
            Algorithm::FixedOmega => "fixed_omega",
        }
    }

    fn strategies(self) -> (Strategy, Strategy) {
        match self {
            Algorithm::FixedQ => (Strategy::WarmFixedQ, Strategy::ColdFixedQ),
            Algorithm::FixedOmega => (Strategy::WarmFixedOmega, Strategy::ColdFixedOmega),
        }
    }
}

/// Warm over cold cost for one (dataset, ordering, algorithm).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioRow {
    pub dataset: String,
    pub ordering_seed: u64,
    pub algorithm: Algorithm,
    pub warm_wall_s: f64,
    pub cold_wall_s: f64,
    pub wall_ratio: f64,
    pub warm_updates: u64,
    pub cold_updates: u64,
    pub update_ratio: f64,
}

pub fn timing_ratios(records: &[BenchRecord]) -> Vec<RatioRow> {
    let mut index: BTreeMap<(&str, u64, Strategy), &BenchRecord> = BTreeMap::new();
    for r in records {
        index.insert((r.dataset.as_str(), r.ordering_seed, r.strategy), r);
    }
    let mut keys: Vec<(&str, u64)> = Vec::new();
    for r in records {
        let key = (r.dataset.as_str(), r.ordering_seed);
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    let mut rows = Vec::new();
    for (dataset, seed) in keys {
        for algorithm in [Algorithm::FixedQ, Algorithm::FixedOmega] {
            let (warm_s, cold_s) = algorithm.strategies();
            let (Some(warm), Some(cold)) = (
                index.get(&(dataset, seed, warm_s)),
                index.get(&(dataset, seed, cold_s)),
            ) else {
                continue;
            };
            rows.push(RatioRow {
                dataset: dataset.to_owned(),
                ordering_seed: seed,
                algorithm,
                warm_wall_s: warm.wall_time_s,
                cold_wall_s: cold.wall_time_s,
                wall_ratio: warm.wall_time_s / cold.wall_time_s,
                warm_updates: warm.total_updates,
                cold_updates: cold.total_updates,
                update_ratio: warm.total_updates as f64 / cold.total_updates.max(1) as f64,
            });
        }
    }
    rows
}

/// Mean and maximum of the ratios across orderings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioSummary {
    pub dataset: String,
    pub algorithm: Algorithm,
    pub orderings: usize,
    pub mean_wall_ratio: f64,
    pub max_wall_ratio: f64,
    pub mean_update_ratio: f64,
    pub max_update_ratio: f64,
}

pub fn summarize_ratios(rows: &[RatioRow]) -> Vec<RatioSummary> {
    let mut groups: BTreeMap<(String, Algorithm), Vec<&RatioRow>> = BTreeMap::new();
    for r in rows {
        groups
            .entry((r.dataset.clone(), r.algorithm))
            .or_default()
            .push(r);
    }
    groups
        .into_iter()
        .map(|((dataset, algorithm), rs)| {
            let n = rs.len() as f64;
            let mean = |f: fn(&RatioRow) -> f64| rs.iter().map(|r| f(r)).sum::<f64>() / n;
            let max = |f: fn(&RatioRow) -> f64| rs.iter().map(|r| f(r)).fold(f64::MIN, f64::max);
            RatioSummary {
                dataset,
                algorithm,
                orderings: rs.len(),
                mean_wall_ratio: mean(|r| r.wall_ratio),
                max_wall_ratio: max(|r| r.wall_ratio),
                mean_update_ratio: mean(|r| r.update_ratio),
                max_update_ratio: max(|r| r.update_ratio),
            }
        })
        .collect()
}

/// How often one strategy matches the best objective at a cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementRow {
    pub dataset: String,
    pub strategy: Strategy,
    pub cells: usize,
    pub agreeing: usize,
    pub proportion: f64,
    pub convex_cells: usize,
    pub convex_agreeing: usize,
    pub nonconvex_cells: usize,
    pub nonconvex_agreeing: usize,
}

impl AgreementRow {
    pub fn convex_proportion(&self) -> f64 {
        ratio(self.convex_agreeing, self.convex_cells)
    }

    pub fn nonconvex_proportion(&self) -> f64 {
        ratio(self.nonconvex_agreeing, self.nonconvex_cells)
    }
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        1.0
    } else {
        a as f64 / b as f64
    }
}

/// Per-cell agreement: a strategy agrees at a cell when its objective is
/// within `tolerance` of the lowest objective any strategy reached at that
/// cell under the same ordering. Counts pool all orderings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementReport {
    pub tolerance: f64,
    pub rows: Vec<AgreementRow>,
}

impl AgreementReport {
    pub fn row(&self, dataset: &str, strategy: Strategy) -> Option<&AgreementRow> {
        self.rows
            .iter()
            .find(|r| r.dataset == dataset && r.strategy == strategy)
    }
}

pub fn agreement_report(records: &[BenchRecord], tolerance: f64) -> AgreementReport {
    let mut groups: BTreeMap<(&str, u64), Vec<&BenchRecord>> = BTreeMap::new();
    for r in records {
        groups
            .entry((r.dataset.as_str(), r.ordering_seed))
            .or_default()
            .push(r);
    }
    let mut tallies: BTreeMap<(String, Strategy), AgreementRow> = BTreeMap::new();
    for ((dataset, _), group) in groups {
        let n_cells = group.iter().map(|r| r.cells.len()).min().unwrap_or(0);
        let best: Vec<f64> = (0..n_cells)
            .map(|i| {
                group
                    .iter()
                    .map(|r| r.cells[i].objective)
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        for r in &group {
            let row = tallies
                .entry((dataset.to_owned(), r.strategy))
                .or_insert_with(|| AgreementRow {
                    dataset: dataset.to_owned(),
                    strategy: r.strategy,
                    cells: 0,
                    agreeing: 0,
                    proportion: 0.0,
                    convex_cells: 0,
                    convex_agreeing: 0,
                    nonconvex_cells: 0,
                    nonconvex_agreeing: 0,
                });
            for (cell, &min) in r.cells.iter().zip(&best) {
                let agrees = cell.objective <= min + tolerance;
                row.cells += 1;
                row.agreeing += agrees as usize;
                if cell.q >= 1.0 {
                    row.convex_cells += 1;
                    row.convex_agreeing += agrees as usize;
                } else {
                    row.nonconvex_cells += 1;
                    row.nonconvex_agreeing += agrees as usize;
                }
            }
        }
    }
    let rows = tallies
        .into_values()
        .map(|mut r| {
            r.proportion = ratio(r.agreeing, r.cells);
            r
        })
        .collect();
    AgreementReport { tolerance, rows }
}
