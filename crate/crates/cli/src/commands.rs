use std::fs;
use std::path::{Path, PathBuf};

use powreg_core::bench::{
    agreement_report, bench_dataset, ordering_from_seed, summarize_ratios, timing_ratios,
    unique_orderings, BenchConfig,
};
use powreg_core::curve::{threshold_curve, CurveFamily};
use powreg_core::data::{load_csv, standardize, StandardizedDataset, SynthSpec};
use powreg_core::path::{
    base_omega_grid, build_omega_grid, cold_path_fixed_omega, cold_path_fixed_q, path_fixed_omega,
    path_fixed_q, surface, QGrid,
};
use powreg_core::solver::{solve, SolveConfig};
use powreg_core::{PenaltyPoint, PowregError, SolutionPath, Strategy};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::args::{
    BenchArgs, Command, CurveArgs, DataArgs, GridArgs, PathArgs, ReplayArgs, SolveArgs, SolverArgs,
    SurfaceArgs,
};
use crate::output::{
    write_csv, AgreementCsvRow, BenchCellRow, BenchRecordRow, CellRow, CoefRow, CurveCsvRow,
    PathRow,
};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] PowregError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// 2 for bad input, 1 for everything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::Core(e) => match e {
                PowregError::Io { .. } | PowregError::Csv(_) => 1,
                PowregError::RootNotConverged { .. } => 1,
                _ => 2,
            },
            _ => 1,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn invalid<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Invalid(msg.into()))
}

pub const ORDERING_GENERATOR: &str = "ChaCha8 seeded Fisher-Yates shuffle of 0..p";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetInfo {
    pub label: String,
    pub source: String,
    pub response: String,
    pub synth: Option<SynthSpec>,
    pub n: usize,
    pub p: usize,
    pub feature_names: Vec<String>,
    /// Absent for single-covariate data.
    pub mean_abs_correlation: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrderingInfo {
    pub dataset: String,
    pub seed: u64,
    pub permutation: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Grids {
    pub omega: Vec<f64>,
    pub q: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub run: Command,
    pub datasets: Vec<DatasetInfo>,
    pub ordering_generator: String,
    pub orderings: Vec<OrderingInfo>,
    pub grids: Option<Grids>,
    pub outputs: Vec<String>,
    pub results: serde_json::Value,
}

impl Manifest {
    fn new(run: &Command) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").to_owned(),
            version: env!("CARGO_PKG_VERSION").to_owned(),
            run: run.clone(),
            datasets: Vec::new(),
            ordering_generator: ORDERING_GENERATOR.to_owned(),
            orderings: Vec::new(),
            grids: None,
            outputs: Vec::new(),
            results: serde_json::Value::Null,
        }
    }

    fn write(&mut self, dir: &Path) -> CliResult<()> {
        self.outputs.push("manifest.json".into());
        let path = dir.join("manifest.json");
        let text = serde_json::to_string_pretty(self)?;
        fs::write(&path, text + "\n").map_err(|source| CliError::Io { path, source })
    }
}

pub struct Loaded {
    pub info: DatasetInfo,
    pub data: StandardizedDataset,
}

/// `seed=1,n=100,p=50,k=10,rho=0.3,sd=1`; absent keys keep these values.
pub fn parse_synth(spec: &str) -> CliResult<SynthSpec> {
    let mut out = SynthSpec {
        seed: 1,
        n: 100,
        p: 50,
        sparsity: 10,
        rho: 0.3,
        noise_sd: 1.0,
    };
    for part in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let Some((key, value)) = part.split_once('=') else {
            return invalid(format!("synthetic spec entry {part:?} is not key=value"));
        };
        let bad =
            || CliError::Invalid(format!("bad value {value:?} for {key:?} in synthetic spec"));
        match key.trim() {
            "seed" => out.seed = value.parse().map_err(|_| bad())?,
            "n" => out.n = value.parse().map_err(|_| bad())?,
            "p" => out.p = value.parse().map_err(|_| bad())?,
            "k" | "sparsity" => out.sparsity = value.parse().map_err(|_| bad())?,
            "rho" => out.rho = value.parse().map_err(|_| bad())?,
            "sd" | "noise_sd" => out.noise_sd = value.parse().map_err(|_| bad())?,
            other => return invalid(format!("unknown synthetic spec key {other:?}")),
        }
    }
    Ok(out)
}

fn load_all(args: &DataArgs) -> CliResult<Vec<Loaded>> {
    if !args.data.is_empty() && args.response.is_none() {
        return invalid("--data needs --response");
    }
    let mut out = Vec::new();
    for path in &args.data {
        let response = args.response.as_deref().unwrap_or_default();
        let raw = load_csv(path, response)?;
        let mut data = standardize(&raw)?;
        let label = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        data.name = label.clone();
        let info = DatasetInfo {
            label,
            source: path.display().to_string(),
            response: response.to_owned(),
            synth: None,
            n: data.problem.n(),
            p: data.problem.p(),
            feature_names: data.feature_names.clone(),
            mean_abs_correlation: data.mean_abs_correlation().ok(),
        };
        out.push(Loaded { info, data });
    }
    for spec in &args.synth {
        let spec = parse_synth(spec)?;
        let data = spec.build()?;
        let info = DatasetInfo {
            label: spec.label(),
            source: "synthetic".into(),
            response: data.response_name.clone(),
            synth: Some(spec),
            n: data.problem.n(),
            p: data.problem.p(),
            feature_names: data.feature_names.clone(),
            mean_abs_correlation: data.mean_abs_correlation().ok(),
        };
        out.push(Loaded { info, data });
    }
    if out.is_empty() {
        return invalid("no dataset: pass --data FILE --response NAME or --synth SPEC");
    }
    Ok(out)
}

fn load_one(args: &DataArgs) -> CliResult<Loaded> {
    let mut all = load_all(args)?;
    if all.len() != 1 {
        return invalid(format!("this command takes one dataset, got {}", all.len()));
    }
    Ok(all.remove(0))
}

fn solve_config(args: &SolverArgs, p: usize) -> CliResult<(SolveConfig, Option<Vec<usize>>)> {
    let mut config = SolveConfig {
        tol: args.tol,
        max_sweeps: args.max_sweeps,
        ..SolveConfig::default()
    };
    let ordering = args.ordering_seed.map(|s| ordering_from_seed(p, s));
    config.ordering = ordering.clone();
    config.validate(p)?;
    Ok((config, ordering))
}

fn prepare_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_owned(),
        source,
    })
}

fn coef_rows<'a>(
    dataset: &str,
    strategy: &str,
    seed: Option<u64>,
    omega: f64,
    q: f64,
    beta: &'a [f64],
) -> impl Iterator<Item = CoefRow> + 'a {
    let dataset = dataset.to_owned();
    let strategy = strategy.to_owned();
    beta.iter().enumerate().map(move |(j, &value)| CoefRow {
        dataset: dataset.clone(),
        strategy: strategy.clone(),
        ordering_seed: seed,
        omega,
        q,
        coefficient_index: j,
        // Drop the sign of negative zeros.
        value: value + 0.0,
    })
}

pub fn run(command: &Command) -> CliResult<PathBuf> {
    match command {
        Command::ThresholdCurve(a) => cmd_threshold_curve(command, a),
        Command::Solve(a) => cmd_solve(command, a),
        Command::Path(a) => cmd_path(command, a),
        Command::Surface(a) => cmd_surface(command, a),
        Command::Bench(a) => cmd_bench(command, a),
        Command::Replay(a) => cmd_replay(a),
    }
}

fn cmd_threshold_curve(command: &Command, a: &CurveArgs) -> CliResult<PathBuf> {
    let family = match (a.omega, a.q) {
        (Some(omega), None) => CurveFamily::FixedOmega {
            omega,
            qs: a.qs.clone(),
        },
        (None, Some(q)) => CurveFamily::FixedQ {
            q,
            omegas: a.omegas.clone(),
        },
        _ => return invalid("pass either --omega with --qs, or --q with --omegas"),
    };
    let rows = threshold_curve(&family, a.b_min, a.b_max, a.points)?;
    prepare_dir(&a.out_dir)?;
    write_csv::<CurveCsvRow>(
        &a.out_dir.join("threshold_curve.csv"),
        rows.iter().map(|r| CurveCsvRow {
            b: r.b,
            q: r.q,
            omega: r.omega,
            h: r.h + 0.0,
        }),
    )?;
    let mut manifest = Manifest::new(command);
    manifest.outputs.push("threshold_curve.csv".into());
    manifest.results = json!({ "rows": rows.len() });
    manifest.write(&a.out_dir)?;
    Ok(a.out_dir.clone())
}

fn cmd_solve(command: &Command, a: &SolveArgs) -> CliResult<PathBuf> {
    let loaded = load_one(&a.data)?;
    let problem = &loaded.data.problem;
    let (config, ordering) = solve_config(&a.solver, problem.p())?;
    let point = PenaltyPoint::new(a.omega, a.q)?;
    let sol = solve(problem, point, &vec![0.0; problem.p()], &config)?;
    prepare_dir(&a.out_dir)?;
    write_csv(
        &a.out_dir.join("coefficients.csv"),
        coef_rows(
            &loaded.info.label,
            "single",
            a.solver.ordering_seed,
            a.omega,
            a.q,
            &sol.beta,
        ),
    )?;
    let (intercept, slopes) = loaded.data.to_original_scale(&sol.beta)?;
    let mut manifest = Manifest::new(command);
    if let (Some(seed), Some(perm)) = (a.solver.ordering_seed, ordering) {
        manifest.orderings.push(OrderingInfo {
            dataset: loaded.info.label.clone(),
            seed,
            permutation: perm,
        });
    }
    manifest.datasets.push(loaded.info);
    manifest.outputs.push("coefficients.csv".into());
    manifest.results = json!({
        "objective": sol.objective,
        "sweeps": sol.sweeps,
        "updates": sol.updates,
        "converged": sol.converged,
        "original_scale": { "intercept": intercept, "slopes": slopes },
    });
    manifest.write(&a.out_dir)?;
    Ok(a.out_dir.clone())
}

fn path_rows(path: &SolutionPath) -> CliResult<Vec<PathRow>> {
    (0..path.grid.len())
        .map(|l| {
            let point = path.point(l)?;
            let s = &path.solutions[l];
            Ok(PathRow {
                omega: point.omega(),
                q: point.q(),
                objective: s.objective,
                sweeps: s.sweeps,
                updates: s.updates,
                converged: s.converged,
                nonzero: s.beta.iter().filter(|b| **b != 0.0).count(),
            })
        })
        .collect()
}

fn cmd_path(command: &Command, a: &PathArgs) -> CliResult<PathBuf> {
    let loaded = load_one(&a.data)?;
    let problem = &loaded.data.problem;
    let (config, ordering) = solve_config(&a.solver, problem.p())?;
    let (path, strategy, grids) = match (a.q, a.omega) {
        (Some(q), None) => {
            PenaltyPoint::new(1.0, q)?;
            let grid = build_omega_grid(problem, q, a.grid.k_omega, a.grid.omega_floor)?;
            let path = if a.cold {
                cold_path_fixed_q(problem, q, &grid, &config)?
            } else {
                path_fixed_q(problem, q, &grid, &config)?
            };
            let strategy = if a.cold {
                Strategy::ColdFixedQ
            } else {
                Strategy::WarmFixedQ
            };
            let grids = Grids {
                omega: grid.values().to_vec(),
                q: vec![q],
            };
            (path, strategy, grids)
        }
        (None, Some(omega)) => {
            PenaltyPoint::new(omega, 1.0)?;
            let grid = QGrid::equispaced(a.grid.k_q, a.grid.q_last)?;
            let path = if a.cold {
                cold_path_fixed_omega(problem, omega, &grid, &config)?
            } else {
                path_fixed_omega(problem, omega, &grid, &config)?
            };
            let strategy = if a.cold {
                Strategy::ColdFixedOmega
            } else {
                Strategy::WarmFixedOmega
            };
            let grids = Grids {
                omega: vec![omega],
                q: grid.values().to_vec(),
            };
            (path, strategy, grids)
        }
        _ => return invalid("pass exactly one of --q or --omega"),
    };
    prepare_dir(&a.out_dir)?;
    let rows = path_rows(&path)?;
    let label = loaded.info.label.clone();
    let mut coefs = Vec::new();
    for (l, row) in rows.iter().enumerate() {
        coefs.extend(coef_rows(
            &label,
            strategy.name(),
            a.solver.ordering_seed,
            row.omega,
            row.q,
            &path.solutions[l].beta,
        ));
    }
    write_csv(&a.out_dir.join("coefficients.csv"), coefs)?;
    write_csv(&a.out_dir.join("path.csv"), rows.iter().cloned())?;
    let mut manifest = Manifest::new(command);
    if let (Some(seed), Some(perm)) = (a.solver.ordering_seed, ordering) {
        manifest.orderings.push(OrderingInfo {
            dataset: label,
            seed,
            permutation: perm,
        });
    }
    manifest.datasets.push(loaded.info);
    manifest.grids = Some(grids);
    manifest
        .outputs
        .extend(["coefficients.csv".into(), "path.csv".into()]);
    manifest.results = json!({
        "strategy": strategy.name(),
        "total_updates": path.total_updates(),
        "nonconverged": path.nonconverged(),
    });
    manifest.write(&a.out_dir)?;
    Ok(a.out_dir.clone())
}

fn lattice(
    problem: &powreg_core::ProblemInstance,
    g: &GridArgs,
) -> CliResult<(powreg_core::OmegaGrid, QGrid)> {
    Ok((
        base_omega_grid(problem, g.k_omega, g.omega_floor)?,
        QGrid::equispaced(g.k_q, g.q_last)?,
    ))
}

fn cmd_surface(command: &Command, a: &SurfaceArgs) -> CliResult<PathBuf> {
    let strategy: Strategy = a.strategy.parse()?;
    let loaded = load_one(&a.data)?;
    let problem = &loaded.data.problem;
    let (config, ordering) = solve_config(&a.solver, problem.p())?;
    let (omegas, qs) = lattice(problem, &a.grid)?;
    let result = surface(problem, &omegas, &qs, strategy, &config)?;
    prepare_dir(&a.out_dir)?;
    let label = loaded.info.label.clone();
    let mut coefs = Vec::new();
    for c in &result.cells {
        coefs.extend(coef_rows(
            &label,
            strategy.name(),
            a.solver.ordering_seed,
            c.omega,
            c.q,
            &c.beta,
        ));
    }
    write_csv(&a.out_dir.join("coefficients.csv"), coefs)?;
    write_csv(
        &a.out_dir.join("cells.csv"),
        result.cells.iter().map(|c| CellRow {
            omega: c.omega,
            q: c.q,
            objective: c.objective,
            updates: c.updates,
            converged: c.converged,
            nonzero: c.beta.iter().filter(|b| **b != 0.0).count(),
        }),
    )?;
    let mut manifest = Manifest::new(command);
    if let (Some(seed), Some(perm)) = (a.solver.ordering_seed, ordering) {
        manifest.orderings.push(OrderingInfo {
            dataset: label,
            seed,
            permutation: perm,
        });
    }
    manifest.datasets.push(loaded.info);
    manifest.grids = Some(Grids {
        omega: omegas.values().to_vec(),
        q: qs.values().to_vec(),
    });
    manifest
        .outputs
        .extend(["coefficients.csv".into(), "cells.csv".into()]);
    manifest.results = json!({
        "strategy": strategy.name(),
        "total_updates": result.total_updates,
        "nonconverged": result.nonconverged(),
    });
    manifest.write(&a.out_dir)?;
    Ok(a.out_dir.clone())
}

fn cmd_bench(command: &Command, a: &BenchArgs) -> CliResult<PathBuf> {
    if a.n_orderings == 0 {
        return invalid("--n-orderings must be at least 1");
    }
    if !(a.agreement_tol >= 0.0 && a.agreement_tol.is_finite()) {
        return invalid(format!(
            "--agreement-tol must be finite and >= 0, got {}",
            a.agreement_tol
        ));
    }
    let datasets = load_all(&a.data)?;
    let config = BenchConfig {
        n_orderings: a.n_orderings,
        base_seed: a.base_seed,
        k_omega: a.grid.k_omega,
        omega_floor: a.grid.omega_floor,
        k_q: a.grid.k_q,
        q_last: a.grid.q_last,
        agreement_tol: a.agreement_tol,
        solve: SolveConfig {
            tol: a.tol,
            max_sweeps: a.max_sweeps,
            ..SolveConfig::default()
        },
    };
    config.solve.validate(0)?;
    let mut manifest = Manifest::new(command);
    let mut records = Vec::new();
    let mut grids = serde_json::Map::new();
    for d in &datasets {
        let problem = &d.data.problem;
        let (omegas, qs) = lattice(problem, &a.grid)?;
        grids.insert(
            d.info.label.clone(),
            json!({ "omega": omegas.values(), "q": qs.values() }),
        );
        for (seed, perm) in unique_orderings(problem.p(), a.n_orderings, a.base_seed) {
            manifest.orderings.push(OrderingInfo {
                dataset: d.info.label.clone(),
                seed,
                permutation: perm,
            });
        }
        records.extend(bench_dataset(&d.info.label, problem, &config)?);
    }
    prepare_dir(&a.out_dir)?;
    write_csv(
        &a.out_dir.join("bench_records.csv"),
        records.iter().map(|r| BenchRecordRow {
            dataset: r.dataset.clone(),
            strategy: r.strategy.name().into(),
            ordering_seed: r.ordering_seed,
            wall_time_s: r.wall_time_s,
            total_updates: r.total_updates,
            nonconverged_cells: r.nonconverged_cells,
        }),
    )?;
    write_csv(
        &a.out_dir.join("bench_cells.csv"),
        records.iter().flat_map(|r| {
            r.cells.iter().map(move |c| BenchCellRow {
                dataset: r.dataset.clone(),
                strategy: r.strategy.name().into(),
                ordering_seed: r.ordering_seed,
                omega: c.omega,
                q: c.q,
                objective: c.objective,
                converged: c.converged,
            })
        }),
    )?;
    let ratios = timing_ratios(&records);
    let summary = summarize_ratios(&ratios);
    write_csv(
        &a.out_dir.join("ratios.csv"),
        ratios.iter().map(crate::output::RatioCsvRow::from),
    )?;
    write_csv(
        &a.out_dir.join("ratio_summary.csv"),
        summary.iter().map(crate::output::SummaryCsvRow::from),
    )?;
    let report = agreement_report(&records, a.agreement_tol);
    write_csv(
        &a.out_dir.join("agreement.csv"),
        report
            .rows
            .iter()
            .map(|r| AgreementCsvRow::new(r, report.tolerance)),
    )?;
    manifest.datasets = datasets.into_iter().map(|d| d.info).collect();
    manifest.outputs.extend(
        [
            "bench_records.csv",
            "bench_cells.csv",
            "ratios.csv",
            "ratio_summary.csv",
            "agreement.csv",
        ]
        .map(String::from),
    );
    manifest.results = json!({
        "lattices": grids,
        "agreement_rule": "per cell: a strategy agrees when its objective is within the tolerance of the lowest objective any strategy reached at that cell under the same ordering; counts pool orderings",
        "ratio_summary": summary,
    });
    manifest.write(&a.out_dir)?;
    Ok(a.out_dir.clone())
}

#[derive(Deserialize)]
struct ManifestHead {
    run: Command,
}

fn cmd_replay(a: &ReplayArgs) -> CliResult<PathBuf> {
    let text = fs::read_to_string(&a.manifest).map_err(|source| CliError::Io {
        path: a.manifest.clone(),
        source,
    })?;
    let mut head: ManifestHead = serde_json::from_str(&text)
        .map_err(|e| CliError::Invalid(format!("{}: not a manifest: {e}", a.manifest.display())))?;
    if matches!(head.run, Command::Replay(_)) {
        return invalid("a manifest cannot record a replay");
    }
    if let Some(dir) = &a.out_dir {
        head.run.set_out_dir(dir.clone());
    }
    run(&head.run)
}
