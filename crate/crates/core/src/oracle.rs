//! Brute-force reference for the thresholding function.
//!
//! Grid search over β, never called by the solvers. Tests use it to check
//! [`crate::threshold::threshold`] without sharing any of its formulas.

use crate::threshold::PenaltyPoint;

fn objective(weight: f64, q: f64, b: f64, beta: f64) -> f64 {
    0.5 * (b - beta) * (b - beta) + weight * beta.abs().powf(q)
}

fn grid_argmin(weight: f64, q: f64, b: f64, lo: f64, hi: f64, points: usize) -> (f64, f64) {
    let step = (hi - lo) / (points - 1) as f64;
    let mut best = (lo, f64::INFINITY);
    for i in 0..points {
        let beta = lo + step * i as f64;
        let value = objective(weight, q, b, beta);
        if value < best.1 {
            best = (beta, value);
        }
    }
    best
}

/// Argmin of `½(b − β)² + (ω^(2−q)/q)|β|^q` over a uniform grid on
/// `[−grid_half_width, grid_half_width]`, refined once on the two cells
/// around the best node. `β = 0` is always a candidate, since for `q ≤ 1` the
/// objective has a cusp there that a grid can straddle.
pub fn brute_force_threshold(
    point: PenaltyPoint,
    b: f64,
    grid_half_width: f64,
    grid_points: usize,
) -> f64 {
    let (omega, q) = (point.omega(), point.q());
    let weight = omega.powf(2.0 - q) / q;
    let points = grid_points.max(3);

    let (coarse, _) = grid_argmin(weight, q, b, -grid_half_width, grid_half_width, points);
    let cell = 2.0 * grid_half_width / (points - 1) as f64;
    let (fine, fine_value) = grid_argmin(weight, q, b, coarse - cell, coarse + cell, points);

    if objective(weight, q, b, 0.0) <= fine_value {
        0.0
    } else {
        fine
    }
}
