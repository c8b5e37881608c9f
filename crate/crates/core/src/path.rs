//! Warm-start paths along ω (fixed q) and along q (fixed ω), their
//! cold-start baselines, and full (ω, q) surfaces.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{domain, PowregError, Result};
use crate::problem::ProblemInstance;
use crate::solver::{ridge_solution, solve, Solution, SolveConfig};
use crate::threshold::{inverse_unit_alpha, PenaltyPoint};

pub const DEFAULT_K_OMEGA: usize = 20;
pub const DEFAULT_OMEGA_FLOOR: f64 = 1e-7;
pub const DEFAULT_K_Q: usize = 20;
pub const DEFAULT_Q_LAST: f64 = 0.1;

/// Smallest ω at which cyclic descent started from zero stays at zero (`q ≤ 1`).
/// For `q > 1` this is `max_j |xⱼ′y|`, used only to anchor grids.
pub fn omega_min(q: f64, problem: &ProblemInstance) -> Result<f64> {
    if !(q > 0.0 && q <= 2.0) {
        return Err(domain("omega_min", format!("requires 0 < q <= 2, got {q}")));
    }
    let xy = problem.col_y_products();
    if q > 1.0 {
        return Ok(xy.iter().fold(0.0, |m, v| m.max(v.abs())));
    }
    let unit = inverse_unit_alpha(q);
    let exponent = (q - 1.0) / (2.0 - q);
    Ok(problem
        .col_sq_norms()
        .iter()
        .zip(xy)
        .map(|(&c, &v)| c.powf(exponent) * v.abs() * unit)
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GridOrigin {
    FromOmegaMin,
    UserSupplied,
}

/// Strictly decreasing positive ω values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OmegaGrid {
    values: Vec<f64>,
    origin: GridOrigin,
}

impl OmegaGrid {
    pub fn user(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(PowregError::InvalidGrid("omega grid is empty".into()));
        }
        if values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(PowregError::InvalidGrid(
                "omega values must be finite and > 0".into(),
            ));
        }
        if values.windows(2).any(|w| w[1] >= w[0]) {
            return Err(PowregError::InvalidGrid(
                "omega values must be strictly decreasing".into(),
            ));
        }
        Ok(Self {
            values,
            origin: GridOrigin::UserSupplied,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn origin(&self) -> GridOrigin {
        self.origin
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// `k` log-equispaced values from `hi` down to `lo`, endpoints exact.
pub fn log_spaced(hi: f64, lo: f64, k: usize) -> Vec<f64> {
    if k == 1 {
        return vec![hi];
    }
    let (lhi, llo) = (hi.ln(), lo.ln());
    (0..k)
        .map(|i| match i {
            0 => hi,
            i if i == k - 1 => lo,
            i => (lhi + (llo - lhi) * i as f64 / (k - 1) as f64).exp(),
        })
        .collect()
}

/// The shared base grid: `k` log-equispaced values from `omega_min(1)` to `floor`.
pub fn base_omega_grid(problem: &ProblemInstance, k: usize, floor: f64) -> Result<OmegaGrid> {
    if k < 2 {
        return Err(PowregError::InvalidGrid(format!("k must be >= 2, got {k}")));
    }
    let top = omega_min(1.0, problem)?;
    if !(floor > 0.0 && floor < top) {
        return Err(PowregError::InvalidGrid(format!(
            "floor {floor} must lie in (0, omega_min(1) = {top})"
        )));
    }
    Ok(OmegaGrid {
        values: log_spaced(top, floor, k),
        origin: GridOrigin::FromOmegaMin,
    })
}

/// `omega_min(q)` followed by the base-grid values strictly below it.
pub fn build_omega_grid(
    problem: &ProblemInstance,
    q: f64,
    k: usize,
    floor: f64,
) -> Result<OmegaGrid> {
    let base = base_omega_grid(problem, k, floor)?;
    let head = omega_min(q, problem)?;
    Ok(OmegaGrid {
        values: headed(head, base.values()),
        origin: GridOrigin::FromOmegaMin,
    })
}

fn headed(head: f64, base: &[f64]) -> Vec<f64> {
    std::iter::once(head)
        .chain(base.iter().copied().filter(|&w| w < head))
        .collect()
}

/// Decreasing exponents starting at 2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QGrid {
    values: Vec<f64>,
}

impl QGrid {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.first() != Some(&2.0) {
            return Err(PowregError::InvalidGrid("q grid must start at 2".into()));
        }
        if values.windows(2).any(|w| w[1] >= w[0]) {
            return Err(PowregError::InvalidGrid(
                "q values must be strictly decreasing".into(),
            ));
        }
        if values.iter().any(|&q| q < crate::threshold::MIN_Q) {
            return Err(PowregError::InvalidGrid(format!(
                "q values must be >= {}",
                crate::threshold::MIN_Q
            )));
        }
        Ok(Self { values })
    }

    /// `k` equally spaced values from 2 down to `last`.
    pub fn equispaced(k: usize, last: f64) -> Result<Self> {
        if k == 0 {
            return Err(PowregError::InvalidGrid("k_q must be >= 1".into()));
        }
        if k == 1 {
            return Self::new(vec![2.0]);
        }
        let step = (2.0 - last) / (k - 1) as f64;
        let values = (0..k)
            .map(|i| {
                if i == k - 1 {
                    last
                } else {
                    2.0 - step * i as f64
                }
            })
            .collect();
        Self::new(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl Default for QGrid {
    fn default() -> Self {
        Self::equispaced(DEFAULT_K_Q, DEFAULT_Q_LAST).expect("default q grid is valid")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PathAxis {
    Omega,
    Q,
}

/// Solutions along one grid axis; column `l` solves at `grid[l]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionPath {
    pub axis: PathAxis,
    /// The coordinate held fixed along the path (q for an ω-path, ω for a q-path).
    pub fixed: f64,
    pub grid: Vec<f64>,
    pub solutions: Vec<Solution>,
}

impl SolutionPath {
    /// The `p × k` coefficient array.
    pub fn coefficients(&self) -> DMatrix<f64> {
        let p = self.solutions.first().map_or(0, |s| s.beta.len());
        DMatrix::from_fn(p, self.solutions.len(), |j, l| self.solutions[l].beta[j])
    }

    pub fn total_updates(&self) -> u64 {
        self.solutions.iter().map(|s| s.updates).sum()
    }

    pub fn point(&self, l: usize) -> Result<PenaltyPoint> {
        match self.axis {
            PathAxis::Omega => PenaltyPoint::new(self.grid[l], self.fixed),
            PathAxis::Q => PenaltyPoint::new(self.fixed, self.grid[l]),
        }
    }

    pub fn nonconverged(&self) -> usize {
        self.solutions.iter().filter(|s| !s.converged).count()
    }
}

fn omega_path(
    problem: &ProblemInstance,
    q: f64,
    grid: &[f64],
    config: &SolveConfig,
    warm: bool,
) -> Result<SolutionPath> {
    let zero = vec![0.0; problem.p()];
    let mut solutions: Vec<Solution> = Vec::with_capacity(grid.len());
    for &omega in grid {
        let point = PenaltyPoint::new(omega, q)?;
        let start = match solutions.last() {
            Some(prev) if warm => prev.beta.as_slice(),
            _ => zero.as_slice(),
        };
        solutions.push(solve(problem, point, start, config)?);
    }
    Ok(SolutionPath {
        axis: PathAxis::Omega,
        fixed: q,
        grid: grid.to_vec(),
        solutions,
    })
}

/// Fixed `q`, decreasing ω: the first column from zero, each later column
/// warm-started from the one before.
pub fn path_fixed_q(
    problem: &ProblemInstance,
    q: f64,
    grid: &OmegaGrid,
    config: &SolveConfig,
) -> Result<SolutionPath> {
    omega_path(problem, q, grid.values(), config, true)
}

/// Every ω on the grid solved independently from zero.
pub fn cold_path_fixed_q(
    problem: &ProblemInstance,
    q: f64,
    grid: &OmegaGrid,
    config: &SolveConfig,
) -> Result<SolutionPath> {
    omega_path(problem, q, grid.values(), config, false)
}

fn q_path(
    problem: &ProblemInstance,
    omega: f64,
    grid: &QGrid,
    config: &SolveConfig,
    warm: bool,
) -> Result<SolutionPath> {
    let ridge = ridge_solution(problem)?;
    let mut solutions: Vec<Solution> = Vec::with_capacity(grid.len());
    for (l, &q) in grid.values().iter().enumerate() {
        let point = PenaltyPoint::new(omega, q)?;
        let solution = if warm && l == 0 {
            ridge.clone()
        } else {
            let start = match solutions.last() {
                Some(prev) if warm => prev.beta.as_slice(),
                _ => ridge.beta.as_slice(),
            };
            solve(problem, point, start, config)?
        };
        solutions.push(solution);
    }
    Ok(SolutionPath {
        axis: PathAxis::Q,
        fixed: omega,
        grid: grid.values().to_vec(),
        solutions,
    })
}

/// Fixed ω, decreasing q from 2: the first column is the ridge solution
/// `(X′X + I)⁻¹X′y`, each later column warm-started from the one before.
pub fn path_fixed_omega(
    problem: &ProblemInstance,
    omega: f64,
    grid: &QGrid,
    config: &SolveConfig,
) -> Result<SolutionPath> {
    q_path(problem, omega, grid, config, true)
}

/// Every q on the grid solved independently from the ridge solution.
pub fn cold_path_fixed_omega(
    problem: &ProblemInstance,
    omega: f64,
    grid: &QGrid,
    config: &SolveConfig,
) -> Result<SolutionPath> {
    q_path(problem, omega, grid, config, false)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Strategy {
    WarmFixedQ,
    ColdFixedQ,
    WarmFixedOmega,
    ColdFixedOmega,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [
        Strategy::WarmFixedQ,
        Strategy::ColdFixedQ,
        Strategy::WarmFixedOmega,
        Strategy::ColdFixedOmega,
    ];

    pub fn is_warm(self) -> bool {
        matches!(self, Strategy::WarmFixedQ | Strategy::WarmFixedOmega)
    }

    /// The strategy on the same axis with the other start rule.
    pub fn counterpart(self) -> Strategy {
        match self {
            Strategy::WarmFixedQ => Strategy::ColdFixedQ,
            Strategy::ColdFixedQ => Strategy::WarmFixedQ,
            Strategy::WarmFixedOmega => Strategy::ColdFixedOmega,
            Strategy::ColdFixedOmega => Strategy::WarmFixedOmega,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Strategy::WarmFixedQ => "warm_fixed_q",
            Strategy::ColdFixedQ => "cold_fixed_q",
            Strategy::WarmFixedOmega => "warm_fixed_omega",
            Strategy::ColdFixedOmega => "cold_fixed_omega",
        }
    }
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Strategy {
    type Err = PowregError;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| PowregError::InvalidConfig(format!("unknown strategy {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceCell {
    pub omega: f64,
    pub q: f64,
    pub beta: Vec<f64>,
    pub objective: f64,
    pub updates: u64,
    pub converged: bool,
}

/// Cells in lattice order (q-major, then ω) plus the cost of producing them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Surface {
    pub strategy: Strategy,
    pub cells: Vec<SurfaceCell>,
    /// All coordinate updates, including path heads that are not lattice cells.
    pub total_updates: u64,
}

impl Surface {
    pub fn nonconverged(&self) -> usize {
        self.cells.iter().filter(|c| !c.converged).count()
    }
}

fn cell_from(omega: f64, q: f64, s: &Solution) -> SurfaceCell {
    SurfaceCell {
        omega,
        q,
        beta: s.beta.clone(),
        objective: s.objective,
        updates: s.updates,
        converged: s.converged,
    }
}

/// Runs `strategy` over every line of the `omega_grid × q_grid` lattice.
///
/// Fixed-q strategies at `q ≤ 1` run on `omega_min(q)` followed by the
/// lattice values below it; lattice cells above `omega_min(q)` are exact zeros.
pub fn surface(
    problem: &ProblemInstance,
    omega_grid: &OmegaGrid,
    q_grid: &QGrid,
    strategy: Strategy,
    config: &SolveConfig,
) -> Result<Surface> {
    let omegas = omega_grid.values();
    let qs = q_grid.values();
    let mut by_cell: Vec<Option<SurfaceCell>> = vec![None; omegas.len() * qs.len()];
    let index = |qi: usize, wi: usize| qi * omegas.len() + wi;
    let mut total_updates = 0u64;

    match strategy {
        Strategy::WarmFixedQ | Strategy::ColdFixedQ => {
            let zero = vec![0.0; problem.p()];
            let zero_objective = 0.5 * problem.y().norm_squared();
            for (qi, &q) in qs.iter().enumerate() {
                let line = if q <= 1.0 {
                    headed(omega_min(q, problem)?, omegas)
                } else {
                    omegas.to_vec()
                };
                let path = omega_path(problem, q, &line, config, strategy == Strategy::WarmFixedQ)?;
                total_updates += path.total_updates();
                for (wi, &omega) in omegas.iter().enumerate() {
                    let cell = match line.iter().position(|&w| w == omega) {
                        Some(l) => cell_from(omega, q, &path.solutions[l]),
                        None => SurfaceCell {
                            omega,
                            q,
                            beta: zero.clone(),
                            objective: zero_objective,
                            updates: 0,
                            converged: true,
                        },
                    };
                    by_cell[index(qi, wi)] = Some(cell);
                }
            }
        }
        Strategy::WarmFixedOmega | Strategy::ColdFixedOmega => {
            for (wi, &omega) in omegas.iter().enumerate() {
                let path = q_path(
                    problem,
                    omega,
                    q_grid,
                    config,
                    strategy == Strategy::WarmFixedOmega,
                )?;
                total_updates += path.total_updates();
                for (qi, &q) in qs.iter().enumerate() {
                    by_cell[index(qi, wi)] = Some(cell_from(omega, q, &path.solutions[qi]));
                }
            }
        }
    }

    Ok(Surface {
        strategy,
        cells: by_cell
            .into_iter()
            .map(|c| c.expect("every lattice cell is filled"))
            .collect(),
        total_updates,
    })
}
