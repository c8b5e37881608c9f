use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use powreg_core::path::{DEFAULT_K_OMEGA, DEFAULT_K_Q, DEFAULT_OMEGA_FLOOR, DEFAULT_Q_LAST};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(
    name = "powreg",
    version,
    about = "Bridge-penalized least squares under the omega parameterization"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Sample h(omega, q; b) over a range of b for a family of curves.
    ThresholdCurve(CurveArgs),
    /// Solve one penalized problem by coordinate descent.
    Solve(SolveArgs),
    /// Solve along a fixed-q or fixed-omega path.
    Path(PathArgs),
    /// Solve every cell of the omega x q lattice with one strategy.
    Surface(SurfaceArgs),
    /// Compare warm and cold strategies over random orderings.
    Bench(BenchArgs),
    /// Rerun the command recorded in a manifest.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct DataArgs {
    /// CSV file with a header row; may be repeated for `bench`.
    #[arg(long = "data")]
    pub data: Vec<PathBuf>,
    /// Response column name for `--data` files.
    #[arg(long)]
    pub response: Option<String>,
    /// Synthetic instance, e.g. `seed=1,n=100,p=50,k=10,rho=0.3,sd=1`.
    /// Missing keys take those values. May be repeated for `bench`.
    #[arg(long = "synth")]
    pub synth: Vec<String>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct GridArgs {
    /// Number of values in the shared omega grid.
    #[arg(long, default_value_t = DEFAULT_K_OMEGA)]
    pub k_omega: usize,
    /// Smallest omega in the shared grid.
    #[arg(long, default_value_t = DEFAULT_OMEGA_FLOOR)]
    pub omega_floor: f64,
    /// Number of q values, equispaced from 2 down to `--q-last`.
    #[arg(long, default_value_t = DEFAULT_K_Q)]
    pub k_q: usize,
    #[arg(long, default_value_t = DEFAULT_Q_LAST)]
    pub q_last: f64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SolverArgs {
    /// Largest coefficient change per sweep at convergence.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 10_000)]
    pub max_sweeps: usize,
    /// Seed of the coordinate ordering; natural order when absent.
    #[arg(long)]
    pub ordering_seed: Option<u64>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[command(allow_negative_numbers = true)]
pub struct CurveArgs {
    /// Hold omega fixed and draw one curve per `--qs` value.
    #[arg(long, requires = "qs", conflicts_with = "q")]
    pub omega: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub qs: Vec<f64>,
    /// Hold q fixed and draw one curve per `--omegas` value.
    #[arg(long, requires = "omegas")]
    pub q: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub omegas: Vec<f64>,
    #[arg(long, default_value_t = -4.0)]
    pub b_min: f64,
    #[arg(long, default_value_t = 4.0)]
    pub b_max: f64,
    #[arg(long, default_value_t = 801)]
    pub points: usize,
    #[arg(long, default_value = "powreg-out")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[command(allow_negative_numbers = true)]
pub struct SolveArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long)]
    pub omega: f64,
    #[arg(long)]
    pub q: f64,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, default_value = "powreg-out")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[command(allow_negative_numbers = true)]
pub struct PathArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Fixed q; omega decreases from omega_min(q) along the shared grid.
    #[arg(long, conflicts_with = "omega", required_unless_present = "omega")]
    pub q: Option<f64>,
    /// Fixed omega; q decreases from 2.
    #[arg(long)]
    pub omega: Option<f64>,
    /// Solve each grid point from the fixed initializer instead of warm starting.
    #[arg(long)]
    pub cold: bool,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, default_value = "powreg-out")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[command(allow_negative_numbers = true)]
pub struct SurfaceArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// warm_fixed_q, cold_fixed_q, warm_fixed_omega or cold_fixed_omega.
    #[arg(long, default_value = "warm_fixed_q")]
    pub strategy: String,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, default_value = "powreg-out")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[command(allow_negative_numbers = true)]
pub struct BenchArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, default_value_t = 10)]
    pub n_orderings: usize,
    /// Ordering i uses seed `base_seed + i`.
    #[arg(long, default_value_t = 20_231_001)]
    pub base_seed: u64,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 10_000)]
    pub max_sweeps: usize,
    /// Objective gap counted as agreement with the best strategy at a cell.
    #[arg(long, default_value_t = powreg_core::bench::DEFAULT_AGREEMENT_TOL)]
    pub agreement_tol: f64,
    #[arg(long, default_value = "powreg-out")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
    /// Write here instead of the recorded output directory.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

impl Command {
    pub fn set_out_dir(&mut self, dir: PathBuf) {
        match self {
            Command::ThresholdCurve(a) => a.out_dir = dir,
            Command::Solve(a) => a.out_dir = dir,
            Command::Path(a) => a.out_dir = dir,
            Command::Surface(a) => a.out_dir = dir,
            Command::Bench(a) => a.out_dir = dir,
            Command::Replay(a) => a.out_dir = Some(dir),
        }
    }
}
