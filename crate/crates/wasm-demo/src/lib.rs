//! Browser bindings. Every export takes plain numbers and returns a JSON
//! string, so the same functions run natively under `cargo test`.

use powreg_core::curve::{threshold_curve, CurveFamily};
use powreg_core::data::synth_instance;
use powreg_core::path::{build_omega_grid, cold_path_fixed_q, path_fixed_q};
use powreg_core::solver::SolveConfig;
use powreg_core::threshold::{
    lambda_equivalent, omega_zero_bound, q_tilde, threshold_with_diagnostics, PenaltyPoint,
};
use serde::Serialize;
use wasm_bindgen::prelude::*;

type Out = Result<String, String>;

fn to_json<T: Serialize>(value: &T) -> Out {
    serde_json::to_string(value).map_err(|e| e.to_string())
}

fn parse_list(text: &str) -> Result<Vec<f64>, String> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|_| format!("not a number: {s:?}")))
        .collect()
}

#[derive(Serialize)]
struct Curve {
    q: f64,
    omega: f64,
    b: Vec<f64>,
    h: Vec<f64>,
}

/// Curves of `h(omega, q; b)` for `b` in `[-b_max, b_max]`, one per entry of
/// the comma-separated `qs`.
#[wasm_bindgen]
pub fn threshold_curves(omega: f64, qs: &str, b_max: f64, points: usize) -> Out {
    let qs = parse_list(qs)?;
    if qs.is_empty() {
        return Err("give at least one q".into());
    }
    let family = CurveFamily::FixedOmega {
        omega,
        qs: qs.clone(),
    };
    let rows = threshold_curve(&family, -b_max, b_max, points).map_err(|e| e.to_string())?;
    let curves: Vec<Curve> = qs
        .iter()
        .map(|&q| {
            let mine: Vec<_> = rows.iter().filter(|r| r.q == q).collect();
            Curve {
                q,
                omega,
                b: mine.iter().map(|r| r.b).collect(),
                h: mine.iter().map(|r| r.h).collect(),
            }
        })
        .collect();
    to_json(&curves)
}

#[derive(Serialize)]
struct Summary {
    h: f64,
    branch: String,
    alpha: f64,
    gamma: f64,
    lambda: f64,
    omega_zero_bound: Option<f64>,
    q_tilde: Option<f64>,
}

/// Everything known about one scalar problem: the minimizer, which branch
/// produced it, the jump location and size, and the zero-set boundaries.
#[wasm_bindgen]
pub fn scalar_summary(omega: f64, q: f64, b: f64) -> Out {
    let point = PenaltyPoint::new(omega, q).map_err(|e| e.to_string())?;
    let (h, diag) = threshold_with_diagnostics(point, b).map_err(|e| e.to_string())?;
    let bound = if q <= 1.0 {
        omega_zero_bound(q, b).ok()
    } else {
        None
    };
    let qt = if b != 0.0 {
        q_tilde(omega / b.abs()).ok()
    } else {
        None
    };
    to_json(&Summary {
        h,
        branch: format!("{:?}", diag.branch),
        alpha: diag.alpha,
        gamma: diag.gamma,
        lambda: lambda_equivalent(point),
        omega_zero_bound: bound,
        q_tilde: qt,
    })
}

#[derive(Serialize)]
struct PathView {
    omega: Vec<f64>,
    /// `coefficients[j][l]` is coefficient `j` at `omega[l]`.
    coefficients: Vec<Vec<f64>>,
    objective: Vec<f64>,
    warm_updates: u64,
    cold_updates: u64,
}

/// Warm-started fixed-q path on a synthetic equicorrelated instance, with the
/// update count of the cold-start path for comparison.
#[wasm_bindgen]
pub fn synthetic_path(
    seed: u32,
    n: usize,
    p: usize,
    sparsity: usize,
    rho: f64,
    q: f64,
    k_omega: usize,
) -> Out {
    let data = synth_instance(seed as u64, n, p, sparsity, rho, 1.0).map_err(|e| e.to_string())?;
    let problem = &data.problem;
    let grid = build_omega_grid(problem, q, k_omega, 1e-4).map_err(|e| e.to_string())?;
    let config = SolveConfig::default();
    let warm = path_fixed_q(problem, q, &grid, &config).map_err(|e| e.to_string())?;
    let cold = cold_path_fixed_q(problem, q, &grid, &config).map_err(|e| e.to_string())?;
    to_json(&PathView {
        omega: grid.values().to_vec(),
        coefficients: (0..p)
            .map(|j| warm.solutions.iter().map(|s| s.beta[j]).collect())
            .collect(),
        objective: warm.solutions.iter().map(|s| s.objective).collect(),
        warm_updates: warm.total_updates(),
        cold_updates: cold.total_updates(),
    })
}
