//! Cyclic coordinate descent at a single penalty point.
//!
//! Each coordinate step is an exact scalar minimization. With residual
//! `r = y − Xβ` and `c = xⱼ′xⱼ`, the coordinate subproblem is
//!
//! ```text
//! c·[½(bⱼ − βⱼ)² + (ωⱼ^(2−q)/q)|βⱼ|^q] + const,   bⱼ = xⱼ′r/c + βⱼ,
//! ```
//!
//! with `ωⱼ = ω·c^(1/(q−2))`, so `βⱼ ← h(ωⱼ, q; bⱼ)`. At `q = 2` the penalty
//! is `½βⱼ²` and the update is `bⱼ·c/(c+1)`.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{PowregError, Result};
use crate::problem::ProblemInstance;
use crate::threshold::{lambda_equivalent, PenaltyPoint, Thresholder, DEFAULT_BOUNDARY_TOL};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    /// Stop once a full sweep moves no coefficient by more than this.
    pub tol: f64,
    pub max_sweeps: usize,
    /// Coordinate visiting order; `None` means `0..p`.
    pub ordering: Option<Vec<usize>>,
    pub boundary_tol: f64,
    /// Recompute the residual from scratch every this many sweeps.
    pub refresh_every: usize,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_sweeps: 10_000,
            ordering: None,
            boundary_tol: DEFAULT_BOUNDARY_TOL,
            refresh_every: 1000,
        }
    }
}

impl SolveConfig {
    pub fn with_ordering(mut self, ordering: Vec<usize>) -> Self {
        self.ordering = Some(ordering);
        self
    }

    pub fn validate(&self, p: usize) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(PowregError::InvalidConfig(format!(
                "tol must be > 0, got {}",
                self.tol
            )));
        }
        if self.max_sweeps == 0 {
            return Err(PowregError::InvalidConfig("max_sweeps must be >= 1".into()));
        }
        if !(self.boundary_tol >= 0.0) {
            return Err(PowregError::InvalidConfig(
                "boundary_tol must be >= 0".into(),
            ));
        }
        if self.refresh_every == 0 {
            return Err(PowregError::InvalidConfig(
                "refresh_every must be >= 1".into(),
            ));
        }
        if let Some(ordering) = &self.ordering {
            if !is_permutation(ordering, p) {
                return Err(PowregError::InvalidConfig(format!(
                    "ordering is not a permutation of 0..{p}"
                )));
            }
        }
        Ok(())
    }

    fn order(&self, p: usize) -> Vec<usize> {
        self.ordering.clone().unwrap_or_else(|| (0..p).collect())
    }
}

pub fn is_permutation(ordering: &[usize], p: usize) -> bool {
    if ordering.len() != p {
        return false;
    }
    let mut seen = vec![false; p];
    for &j in ordering {
        if j >= p || seen[j] {
            return false;
        }
        seen[j] = true;
    }
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub beta: Vec<f64>,
    pub objective: f64,
    pub sweeps: usize,
    /// Coordinate updates performed, one per coordinate visit.
    pub updates: u64,
    pub converged: bool,
}

/// Emitted after every coordinate update by [`solve_monitored`].
#[derive(Debug)]
pub struct UpdateEvent<'a> {
    pub sweep: usize,
    pub index: usize,
    pub previous: f64,
    pub beta: &'a [f64],
    pub residual: &'a [f64],
}

/// `(ω^(2−q)/q)·Σ|βⱼ|^q`.
pub fn penalty_value(beta: &[f64], point: PenaltyPoint) -> f64 {
    let q = point.q();
    let weight = lambda_equivalent(point);
    let sum: f64 = if q == 2.0 {
        beta.iter().map(|b| b * b).sum()
    } else if q == 1.0 {
        beta.iter().map(|b| b.abs()).sum()
    } else {
        beta.iter().map(|b| b.abs().powf(q)).sum()
    };
    weight * sum
}

fn half_sq_norm(v: &[f64]) -> f64 {
    0.5 * v.iter().map(|x| x * x).sum::<f64>()
}

/// `½‖y − Xβ‖² + (ω^(2−q)/q)‖β‖_q^q`.
pub fn objective_value(
    problem: &ProblemInstance,
    beta: &[f64],
    point: PenaltyPoint,
) -> Result<f64> {
    let r = problem.residual(beta)?;
    Ok(half_sq_norm(&r) + penalty_value(beta, point))
}

/// Per-column update rule for one penalty point.
#[derive(Debug, Clone, Copy)]
enum ColumnRule {
    Ridge { shrink: f64 },
    Threshold(Thresholder),
}

impl ColumnRule {
    fn new(point: PenaltyPoint, col_sq_norm: f64, boundary_tol: f64) -> Result<Self> {
        let q = point.q();
        if q == 2.0 {
            return Ok(Self::Ridge {
                shrink: col_sq_norm / (col_sq_norm + 1.0),
            });
        }
        let omega_j = point.omega() * col_sq_norm.powf(1.0 / (q - 2.0));
        let scaled = PenaltyPoint::new(omega_j, q)?;
        Ok(Self::Threshold(Thresholder::with_boundary_tol(
            scaled,
            boundary_tol,
        )))
    }

    #[inline]
    fn apply(&self, b: f64) -> Result<f64> {
        match self {
            Self::Ridge { shrink } => Ok(b * shrink),
            Self::Threshold(t) => t.apply(b),
        }
    }
}

fn column_rules(
    problem: &ProblemInstance,
    point: PenaltyPoint,
    boundary_tol: f64,
) -> Result<Vec<ColumnRule>> {
    problem
        .col_sq_norms()
        .iter()
        .map(|&c| ColumnRule::new(point, c, boundary_tol))
        .collect()
}

#[inline]
fn update_with_rule(
    problem: &ProblemInstance,
    rule: &ColumnRule,
    beta: &mut [f64],
    residual: &mut [f64],
    j: usize,
) -> Result<f64> {
    let col = problem.column(j);
    let c = problem.col_sq_norms()[j];
    let dot: f64 = col.iter().zip(residual.iter()).map(|(x, r)| x * r).sum();
    let old = beta[j];
    let b = dot / c + old;
    let new = rule.apply(b)?;
    let delta = new - old;
    if delta != 0.0 {
        for (ri, xi) in residual.iter_mut().zip(col) {
            *ri -= delta * xi;
        }
        beta[j] = new;
    }
    Ok(delta)
}

/// Exact minimization over coordinate `j`. Requires `residual = y − Xβ` on
/// entry and maintains it. Returns the change in `βⱼ`.
pub fn coordinate_update(
    problem: &ProblemInstance,
    beta: &mut [f64],
    residual: &mut [f64],
    j: usize,
    point: PenaltyPoint,
) -> Result<f64> {
    let p = problem.p();
    if j >= p {
        return Err(PowregError::IndexOutOfRange { index: j, p });
    }
    problem.check_len(beta.len())?;
    if residual.len() != problem.n() {
        return Err(PowregError::DimensionMismatch {
            expected: problem.n(),
            found: residual.len(),
        });
    }
    let rule = ColumnRule::new(point, problem.col_sq_norms()[j], DEFAULT_BOUNDARY_TOL)?;
    update_with_rule(problem, &rule, beta, residual, j)
}

/// Cyclic coordinate descent from `beta0`.
pub fn solve(
    problem: &ProblemInstance,
    point: PenaltyPoint,
    beta0: &[f64],
    config: &SolveConfig,
) -> Result<Solution> {
    solve_monitored(problem, point, beta0, config, |_| {})
}

/// [`solve`] with a callback after every coordinate update.
pub fn solve_monitored<F>(
    problem: &ProblemInstance,
    point: PenaltyPoint,
    beta0: &[f64],
    config: &SolveConfig,
    mut monitor: F,
) -> Result<Solution>
where
    F: FnMut(&UpdateEvent<'_>),
{
    let p = problem.p();
    problem.check_len(beta0.len())?;
    config.validate(p)?;
    if beta0.iter().any(|b| !b.is_finite()) {
        return Err(PowregError::InvalidConfig(
            "starting coefficients must be finite".into(),
        ));
    }

    let rules = column_rules(problem, point, config.boundary_tol)?;
    let order = config.order(p);
    let mut beta = beta0.to_vec();
    let mut residual = problem.residual(&beta)?;
    let mut updates = 0u64;
    let mut sweeps = 0usize;
    let mut converged = false;

    while sweeps < config.max_sweeps {
        if sweeps > 0 && sweeps % config.refresh_every == 0 {
            residual = problem.residual(&beta)?;
        }
        sweeps += 1;
        let mut max_change = 0.0f64;
        for &j in &order {
            let previous = beta[j];
            let delta = update_with_rule(problem, &rules[j], &mut beta, &mut residual, j)?;
            updates += 1;
            max_change = max_change.max(delta.abs());
            monitor(&UpdateEvent {
                sweep: sweeps,
                index: j,
                previous,
                beta: &beta,
                residual: &residual,
            });
        }
        if max_change <= config.tol {
            converged = true;
            break;
        }
    }

    let objective = objective_value(problem, &beta, point)?;
    Ok(Solution {
        beta,
        objective,
        sweeps,
        updates,
        converged,
    })
}

/// `(X′X + I)^(−1)X′y` by Cholesky factorization.
pub fn ridge_closed_form(problem: &ProblemInstance) -> Vec<f64> {
    let x = problem.x();
    let p = problem.p();
    let gram = x.transpose() * x + nalgebra::DMatrix::<f64>::identity(p, p);
    let rhs = DVector::from_column_slice(problem.col_y_products());
    let chol = gram
        .cholesky()
        .expect("X'X + I is symmetric positive definite");
    chol.solve(&rhs).as_slice().to_vec()
}

/// Wraps the ridge solution as a [`Solution`] at `q = 2` (zero updates).
pub fn ridge_solution(problem: &ProblemInstance) -> Result<Solution> {
    let beta = ridge_closed_form(problem);
    let point = PenaltyPoint::new(1.0, 2.0)?;
    let objective = objective_value(problem, &beta, point)?;
    Ok(Solution {
        beta,
        objective,
        sweeps: 0,
        updates: 0,
        converged: true,
    })
}
