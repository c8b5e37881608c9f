//! Scalar mode-thresholding for the ω-parameterized bridge penalty.
//!
//! For a penalty point `(ω, q)` the thresholding function is the global
//! minimizer
//!
//! ```text
//! h(ω, q; b) = argmin_β ½(b − β)² + (ω^(2−q) / q)·|β|^q
//! ```
//!
//! For `q ≤ 1` the minimizer is exactly zero when `|b|` is below the
//! threshold `α(ω, q)` and jumps to magnitude `γ(ω, q)` at the threshold.
//! Above the threshold, and for every `q > 1`, the magnitude is the largest
//! root `φ` of the stationarity condition
//!
//! ```text
//! φ + ω·(φ/ω)^(q−1) = |b|
//! ```
//!
//! `q = 1` reduces to soft thresholding at `ω`, and `q = 2` to `b/2`
//! (the penalty `½β²` does not depend on `ω`).
//!
//! `γ` here carries an `ω` prefactor, `γ = ω·(2(1−q)/q)^(1/(2−q))`. This is
//! the only form consistent with `α` being linear in `ω`; the brute-force
//! oracle in [`crate::oracle`] confirms it (see the tests below).

use serde::{Deserialize, Serialize};

use crate::error::{domain, PowregError, Result};

/// Smallest supported exponent.
pub const MIN_Q: f64 = 0.01;

/// Relative tolerance used to detect `|b| = α`.
pub const DEFAULT_BOUNDARY_TOL: f64 = 1e-12;

const ROOT_MAX_ITER: usize = 200;
const ROOT_STEP_TOL: f64 = 1e-15;

/// One problem on the regularization surface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PenaltyPoint {
    omega: f64,
    q: f64,
}

impl PenaltyPoint {
    pub fn new(omega: f64, q: f64) -> Result<Self> {
        if !omega.is_finite() || omega < 0.0 {
            return Err(domain(
                "PenaltyPoint",
                format!("omega must be finite and >= 0, got {omega}"),
            ));
        }
        if !q.is_finite() || q < MIN_Q || q > 2.0 {
            return Err(domain(
                "PenaltyPoint",
                format!("q must lie in [{MIN_Q}, 2], got {q}"),
            ));
        }
        Ok(Self { omega, q })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// Penalty weight `ω^(2−q)/q` of the equivalent λ-parameterized problem.
    pub fn lambda(&self) -> f64 {
        lambda_equivalent(*self)
    }

    /// Same exponent, different ω.
    pub fn with_omega(&self, omega: f64) -> Result<Self> {
        Self::new(omega, self.q)
    }
}

/// Which branch of the piecewise definition produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    Zero,
    Boundary,
    NonzeroClosedForm,
    NonzeroRoot,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdDiagnostics {
    /// `|b|`-threshold below which the result is zero (0 when `q > 1`).
    pub alpha: f64,
    /// Magnitude of the nonzero minimizer at `|b| = alpha` (0 when `q ≥ 1`).
    pub gamma: f64,
    pub branch: Branch,
}

fn q_is_one(point: PenaltyPoint) -> bool {
    point.q == 1.0
}

/// `(1−q)·ln(2(1−q))`, with its limit 0 at `q = 1`.
fn entropy_term(q: f64) -> f64 {
    let t = 1.0 - q;
    if t <= 0.0 {
        0.0
    } else {
        t * (2.0 * t).ln()
    }
}

/// `α(1, q)^(−1) = (1/(2−q))·(2(1−q))^((1−q)/(2−q))·q^(1/(2−q))` for `q ∈ (0, 1]`.
///
/// Strictly increasing on `(0, 1]`, tends to 0 as `q → 0` and equals 1 at
/// `q = 1`. Evaluated in log space so neither end produces `0^0`.
pub(crate) fn inverse_unit_alpha(q: f64) -> f64 {
    if q >= 1.0 {
        return 1.0;
    }
    let two_minus_q = 2.0 - q;
    ((entropy_term(q) + q.ln()) / two_minus_q).exp() / two_minus_q
}

fn check_sparse_exponent(op: &'static str, q: f64) -> Result<()> {
    if !(q > 0.0 && q <= 1.0) {
        return Err(domain(op, format!("requires 0 < q <= 1, got {q}")));
    }
    Ok(())
}

/// `α(ω, q)`: `h` is exactly zero for `|b| < α`. Linear in ω; equals ω at `q = 1`.
pub fn alpha(point: PenaltyPoint) -> Result<f64> {
    check_sparse_exponent("alpha", point.q)?;
    Ok(point.omega / inverse_unit_alpha(point.q))
}

/// `γ(ω, q) = ω·(2(1−q)/q)^(1/(2−q))`, the jump magnitude at `|b| = α`.
pub fn gamma(point: PenaltyPoint) -> Result<f64> {
    check_sparse_exponent("gamma", point.q)?;
    if point.omega <= 0.0 {
        return Err(domain("gamma", "requires omega > 0"));
    }
    Ok(gamma_unchecked(point.omega, point.q))
}

fn gamma_unchecked(omega: f64, q: f64) -> f64 {
    if q >= 1.0 {
        return 0.0;
    }
    omega * ((2.0 * (1.0 - q) / q).ln() / (2.0 - q)).exp()
}

/// Interior minimum `φ* = ω(1−q)^(1/(2−q))` of `φ ↦ φ + ω(φ/ω)^(q−1)` for `q < 1`.
fn stationary_point(omega: f64, q: f64) -> f64 {
    omega * ((1.0 - q).ln() / (2.0 - q)).exp()
}

/// Bound `B(q, b)` such that `ω > B` forces `h(ω, q; b) = 0`. Equals `|b|` at `q = 1`.
pub fn omega_zero_bound(q: f64, b: f64) -> Result<f64> {
    check_sparse_exponent("omega_zero_bound", q)?;
    Ok(b.abs() * inverse_unit_alpha(q))
}

/// Smallest exponent below which the scalar solution at `ω/|b| = ratio`
/// collapses to zero.
///
/// This is the infimum of `{q = 1} ∪ {q < 1 : α(1, q)^(−1) > ratio}`. The map
/// `q ↦ α(1, q)^(−1)` increases from 0 to 1 on `(0, 1]`, so the result is 1
/// when `ratio ≥ 1` and the bisection root otherwise.
pub fn q_tilde(ratio: f64) -> Result<f64> {
    if !(ratio > 0.0) || !ratio.is_finite() {
        return Err(domain(
            "q_tilde",
            format!("ratio must be finite and > 0, got {ratio}"),
        ));
    }
    if ratio >= 1.0 {
        return Ok(1.0);
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    for _ in 0..ROOT_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if inverse_unit_alpha(mid) > ratio {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// `λ = ω^(2−q)/q`.
pub fn lambda_equivalent(point: PenaltyPoint) -> f64 {
    point.omega.powf(2.0 - point.q) / point.q
}

/// Inverse of [`lambda_equivalent`]: `ω = (qλ)^(1/(2−q))`, defined for `q < 2`.
pub fn omega_from_lambda(lambda: f64, q: f64) -> Result<f64> {
    if !(q > 0.0 && q < 2.0) {
        return Err(domain(
            "omega_from_lambda",
            format!("requires 0 < q < 2, got {q}"),
        ));
    }
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(domain(
            "omega_from_lambda",
            format!("lambda must be finite and >= 0, got {lambda}"),
        ));
    }
    Ok((q * lambda).powf(1.0 / (2.0 - q)))
}

/// Largest root of `φ + ω(φ/ω)^(q−1) = b_abs`.
pub fn phi_root(point: PenaltyPoint, b_abs: f64) -> Result<f64> {
    let PenaltyPoint { omega, q } = point;
    if q == 1.0 {
        return Err(domain("phi_root", "undefined at q = 1"));
    }
    if !(b_abs > 0.0) || !b_abs.is_finite() {
        return Err(domain(
            "phi_root",
            format!("b_abs must be finite and > 0, got {b_abs}"),
        ));
    }
    if omega <= 0.0 {
        return Err(domain("phi_root", "requires omega > 0"));
    }
    if q < 1.0 {
        let a = omega / inverse_unit_alpha(q);
        if b_abs <= a {
            return Err(domain(
                "phi_root",
                format!("b_abs = {b_abs} does not exceed alpha = {a}"),
            ));
        }
    }
    stationarity_root(omega, q, b_abs)
}

/// Safeguarded Newton–bisection on `g(u) = e^u + s·e^((q−1)u) − b_abs` with
/// `u = ln φ` and `s = ω^(2−q)`.
///
/// `g` is convex in `u`. For `q > 1` it is increasing everywhere; for
/// `q < 1` it is increasing to the right of `ln φ*`, which brackets the
/// largest root from the left. Working in log space keeps the bracket
/// meaningful when the root is many orders of magnitude below `b_abs`
/// (q slightly above 1 with ω ≫ |b|).
fn stationarity_root(omega: f64, q: f64, b_abs: f64) -> Result<f64> {
    let log_s = (2.0 - q) * omega.ln();
    let s = log_s.exp();
    let qm1 = q - 1.0;
    let ln_b = b_abs.ln();

    let (mut lo, mut hi) = if q < 1.0 {
        (stationary_point(omega, q).ln(), ln_b)
    } else {
        // One of the two terms is at least b/2 at the root, and neither exceeds b.
        let half = ln_b - std::f64::consts::LN_2;
        (
            half.min((half - log_s) / qm1),
            ln_b.min((ln_b - log_s) / qm1),
        )
    };

    let eval = |u: f64| {
        let lead = u.exp();
        let tail = s * (qm1 * u).exp();
        (lead + tail - b_abs, lead + qm1 * tail)
    };

    let mut u = hi;
    for _ in 0..ROOT_MAX_ITER {
        let (g, dg) = eval(u);
        if g == 0.0 {
            return Ok(u.exp());
        }
        if g > 0.0 {
            hi = u;
        } else {
            lo = u;
        }
        let newton = u - g / dg;
        let next = if dg > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        let scale = u.abs().max(1.0);
        if (next - u).abs() <= ROOT_STEP_TOL * scale || hi - lo <= ROOT_STEP_TOL * scale {
            return Ok(next.exp());
        }
        u = next;
    }
    Err(PowregError::RootNotConverged {
        iterations: ROOT_MAX_ITER,
        q,
        omega,
        b_abs,
    })
}

/// A penalty point with every quantity `threshold` needs precomputed.
///
/// Coordinate descent applies the same point to many inputs; building this
/// once per coordinate avoids re-deriving `α` on every call.
#[derive(Debug, Clone, Copy)]
pub struct Thresholder {
    point: PenaltyPoint,
    rule: Rule,
    boundary_tol: f64,
}

#[derive(Debug, Clone, Copy)]
enum Rule {
    Identity,
    Ridge,
    Soft { lambda: f64 },
    Bridge { alpha: f64, gamma: f64 },
    Smooth,
}

impl Thresholder {
    pub fn new(point: PenaltyPoint) -> Self {
        Self::with_boundary_tol(point, DEFAULT_BOUNDARY_TOL)
    }

    pub fn with_boundary_tol(point: PenaltyPoint, boundary_tol: f64) -> Self {
        let PenaltyPoint { omega, q } = point;
        let rule = if q == 2.0 {
            Rule::Ridge
        } else if omega == 0.0 {
            Rule::Identity
        } else if q == 1.0 {
            Rule::Soft { lambda: omega }
        } else if q < 1.0 {
            Rule::Bridge {
                alpha: omega / inverse_unit_alpha(q),
                gamma: gamma_unchecked(omega, q),
            }
        } else {
            Rule::Smooth
        };
        Self {
            point,
            rule,
            boundary_tol,
        }
    }

    pub fn point(&self) -> PenaltyPoint {
        self.point
    }

    /// `h(ω, q; b)`.
    #[inline]
    pub fn apply(&self, b: f64) -> Result<f64> {
        if b == 0.0 {
            return Ok(0.0);
        }
        let b_abs = b.abs();
        let magnitude = match self.rule {
            Rule::Identity => b_abs,
            Rule::Ridge => 0.5 * b_abs,
            Rule::Soft { lambda } => {
                if b_abs <= lambda * (1.0 + self.boundary_tol) {
                    0.0
                } else {
                    b_abs - lambda
                }
            }
            Rule::Bridge { alpha, .. } => {
                if b_abs <= alpha * (1.0 + self.boundary_tol) {
                    0.0
                } else {
                    stationarity_root(self.point.omega, self.point.q, b_abs)?
                }
            }
            Rule::Smooth => stationarity_root(self.point.omega, self.point.q, b_abs)?,
        };
        Ok(magnitude.copysign(b))
    }

    /// `h(ω, q; b)` together with the branch taken.
    pub fn apply_with_diagnostics(&self, b: f64) -> Result<(f64, ThresholdDiagnostics)> {
        let (alpha, gamma) = match self.rule {
            Rule::Soft { lambda } => (lambda, 0.0),
            Rule::Bridge { alpha, gamma } => (alpha, gamma),
            _ => (0.0, 0.0),
        };
        let b_abs = b.abs();
        let branch = match self.rule {
            _ if b == 0.0 => Branch::Zero,
            Rule::Identity | Rule::Ridge => Branch::NonzeroClosedForm,
            Rule::Soft { lambda: alpha } | Rule::Bridge { alpha, .. } => {
                let tol = alpha * self.boundary_tol;
                if (b_abs - alpha).abs() <= tol {
                    Branch::Boundary
                } else if b_abs < alpha {
                    Branch::Zero
                } else if q_is_one(self.point) {
                    Branch::NonzeroClosedForm
                } else {
                    Branch::NonzeroRoot
                }
            }
            Rule::Smooth => Branch::NonzeroRoot,
        };
        let value = self.apply(b)?;
        Ok((
            value,
            ThresholdDiagnostics {
                alpha,
                gamma,
                branch,
            },
        ))
    }
}

/// Global minimizer of `½(b − β)² + (ω^(2−q)/q)|β|^q`. Ties at `|b| = α` resolve to 0.
pub fn threshold(point: PenaltyPoint, b: f64) -> Result<f64> {
    if !b.is_finite() {
        return Err(domain("threshold", format!("b must be finite, got {b}")));
    }
    Thresholder::new(point).apply(b)
}

pub fn threshold_with_diagnostics(
    point: PenaltyPoint,
    b: f64,
) -> Result<(f64, ThresholdDiagnostics)> {
    if !b.is_finite() {
        return Err(domain("threshold", format!("b must be finite, got {b}")));
    }
    Thresholder::new(point).apply_with_diagnostics(b)
}

/// `sign(b)(|b| − λ)₊`.
pub fn soft_threshold(b: f64, lambda: f64) -> f64 {
    (b.abs() - lambda).max(0.0).copysign(b)
}

/// Scalar objective `½(b − β)² + (ω^(2−q)/q)|β|^q`.
pub fn scalar_objective(point: PenaltyPoint, b: f64, beta: f64) -> f64 {
    0.5 * (b - beta).powi(2) + lambda_equivalent(point) * beta.abs().powf(point.q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::brute_force_threshold;
    use approx::assert_relative_eq;

    fn pt(omega: f64, q: f64) -> PenaltyPoint {
        PenaltyPoint::new(omega, q).unwrap()
    }

    fn residual(omega: f64, q: f64, b_abs: f64, phi: f64) -> f64 {
        (phi + omega * (phi / omega).powf(q - 1.0) - b_abs).abs()
    }

    #[test]
    fn penalty_point_validation() {
        assert!(PenaltyPoint::new(-1.0, 1.0).is_err());
        assert!(PenaltyPoint::new(1.0, 0.0).is_err());
        assert!(PenaltyPoint::new(1.0, 0.005).is_err());
        assert!(PenaltyPoint::new(1.0, 2.1).is_err());
        assert!(PenaltyPoint::new(f64::NAN, 1.0).is_err());
        assert!(PenaltyPoint::new(0.0, 2.0).is_ok());
    }

    #[test]
    fn alpha_examples() {
        assert_eq!(alpha(pt(1.0, 1.0)).unwrap(), 1.0);
        let a = alpha(pt(1.0, 0.5)).unwrap();
        assert_relative_eq!(a, 1.5 * 0.5f64.powf(-2.0 / 3.0), max_relative = 1e-14);
        assert_relative_eq!(a, 2.381101577952299, max_relative = 1e-14);
        assert_relative_eq!(alpha(pt(2.0, 0.5)).unwrap(), 2.0 * a, max_relative = 1e-14);
        assert!(alpha(pt(1.0, 1.5)).is_err());
    }

    #[test]
    fn alpha_is_continuous_at_one() {
        let below = alpha(pt(1.0, 1.0 - 1e-9)).unwrap();
        assert!((below - 1.0).abs() < 1e-6);
    }

    #[test]
    fn alpha_matches_oracle_jump_location() {
        // Bisect on b for the point where the brute-force minimizer leaves zero.
        let point = pt(1.0, 0.5);
        let (mut lo, mut hi) = (2.0, 3.0);
        for _ in 0..30 {
            let mid = 0.5 * (lo + hi);
            if brute_force_threshold(point, mid, 4.0, 20_000) == 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((lo - 2.3811015779522990).abs() < 1e-4, "jump at {lo}");
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(gamma(pt(1.0, 1.0)).unwrap(), 0.0);
        let g = gamma(pt(1.0, 0.5)).unwrap();
        assert_relative_eq!(g, 2f64.powf(2.0 / 3.0), max_relative = 1e-14);
        assert_relative_eq!(gamma(pt(3.0, 0.5)).unwrap(), 3.0 * g, max_relative = 1e-14);
        assert!(gamma(pt(0.0, 0.5)).is_err());
        assert!(gamma(pt(1.0, 1.2)).is_err());
    }

    #[test]
    fn gamma_matches_oracle_at_boundary() {
        // At |b| = α both 0 and γ minimize the scalar objective. The printed
        // 1/ω prefactor would give 1/3·2^(2/3) at ω = 3, which is not a minimizer.
        for &omega in &[1.0, 3.0] {
            let point = pt(omega, 0.5);
            let a = alpha(point).unwrap();
            let g = gamma(point).unwrap();
            let at_zero = scalar_objective(point, a, 0.0);
            let at_gamma = scalar_objective(point, a, g);
            assert!((at_zero - at_gamma).abs() < 1e-12 * a * a);
            let just_above = brute_force_threshold(point, a * (1.0 + 1e-9), 2.0 * a, 100_000);
            assert!(
                (just_above - g).abs() < 1e-4,
                "oracle {just_above} vs gamma {g}"
            );
            let printed = g / omega / omega;
            if omega != 1.0 {
                assert!(scalar_objective(point, a, printed) > at_zero + 1e-3);
            }
        }
    }

    #[test]
    fn phi_root_examples() {
        assert_relative_eq!(
            phi_root(pt(1.0, 1.5), 2.0).unwrap(),
            1.0,
            max_relative = 1e-14
        );
        let expected = (3f64.sqrt() - 1.0).powi(2);
        assert_relative_eq!(
            phi_root(pt(4.0, 1.5), 2.0).unwrap(),
            expected,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            phi_root(pt(1.0, 0.9), 2.0).unwrap(),
            1.0,
            max_relative = 1e-13
        );
    }

    #[test]
    fn phi_root_domain_errors() {
        assert!(phi_root(pt(1.0, 1.0), 2.0).is_err());
        assert!(phi_root(pt(1.0, 0.5), 2.0).is_err());
        assert!(phi_root(pt(1.0, 1.5), 0.0).is_err());
        assert!(phi_root(pt(1.0, 1.5), -1.0).is_err());
    }

    #[test]
    fn phi_root_residual_across_range() {
        for &q in &[
            0.05, 0.3, 0.7, 0.99, 0.999999, 1.000001, 1.01, 1.5, 1.99, 2.0,
        ] {
            for &omega in &[0.01, 0.3, 1.0, 5.0, 40.0] {
                for &b in &[1e-3, 0.2, 1.0, 7.0, 300.0] {
                    let point = pt(omega, q);
                    if q < 1.0 && b <= alpha(point).unwrap() * (1.0 + 1e-9) {
                        continue;
                    }
                    let phi = phi_root(point, b).unwrap();
                    if q > 1.0 && phi == 0.0 {
                        // The root lies below the smallest subnormal.
                        let log_upper = (b.ln() - (2.0 - q) * omega.ln()) / (q - 1.0);
                        assert!(log_upper < -744.0, "q={q} omega={omega} b={b}");
                        continue;
                    }
                    assert!(phi > 0.0 && phi <= b, "q={q} omega={omega} b={b} phi={phi}");
                    let r = residual(omega, q, b, phi);
                    assert!(r <= 1e-12 * b.max(1.0), "q={q} omega={omega} b={b} r={r}");
                    if q < 1.0 {
                        assert!(phi >= gamma(point).unwrap() * (1.0 - 1e-12));
                    }
                }
            }
        }
    }

    #[test]
    fn phi_root_handles_tiny_roots() {
        // φ + 5^0.99·φ^0.01 = 1 has φ ≈ 1e−69.
        let phi = phi_root(pt(5.0, 1.01), 1.0).unwrap();
        assert!(phi > 0.0 && phi < 1e-60);
        assert!(residual(5.0, 1.01, 1.0, phi) < 1e-12);
    }

    #[test]
    fn threshold_examples() {
        assert_eq!(threshold(pt(0.5, 1.0), 2.0).unwrap(), 1.5);
        assert_eq!(threshold(pt(7.0, 2.0), 1.0).unwrap(), 0.5);
        assert_eq!(threshold(pt(1.0, 0.5), 2.0).unwrap(), 0.0);
        assert_relative_eq!(
            threshold(pt(1.0, 0.9), 2.0).unwrap(),
            1.0,
            max_relative = 1e-13
        );
    }

    #[test]
    fn threshold_zero_input() {
        for &q in &[0.1, 0.5, 1.0, 1.5, 2.0] {
            let (v, d) = threshold_with_diagnostics(pt(1.0, q), 0.0).unwrap();
            assert_eq!(v, 0.0);
            assert_eq!(d.branch, Branch::Zero);
        }
    }

    #[test]
    fn threshold_boundary_tie_breaks_to_zero() {
        let point = pt(1.0, 0.5);
        let a = alpha(point).unwrap();
        let (v, d) = threshold_with_diagnostics(point, a).unwrap();
        assert_eq!(v, 0.0);
        assert_eq!(d.branch, Branch::Boundary);
        let (v, d) = threshold_with_diagnostics(point, -a * (1.0 + 1e-6)).unwrap();
        assert!(v < -gamma(point).unwrap() * 0.999);
        assert_eq!(d.branch, Branch::NonzeroRoot);
    }

    #[test]
    fn threshold_rejects_nonfinite() {
        assert!(threshold(pt(1.0, 0.5), f64::INFINITY).is_err());
        assert!(threshold(pt(1.0, 0.5), f64::NAN).is_err());
    }

    #[test]
    fn threshold_with_zero_omega_is_identity_below_two() {
        assert_eq!(threshold(pt(0.0, 0.5), -3.0).unwrap(), -3.0);
        assert_eq!(threshold(pt(0.0, 2.0), -3.0).unwrap(), -1.5);
    }

    #[test]
    fn continuity_at_q_one() {
        for &omega in &[0.2, 1.0, 3.0] {
            for i in 0..=80 {
                let b = -6.0 + 0.15 * i as f64;
                if (b.abs() - omega).abs() < 1e-2 {
                    continue;
                }
                let soft = soft_threshold(b, omega);
                for &q in &[1.0 - 1e-6, 1.0 + 1e-6] {
                    let h = threshold(pt(omega, q), b).unwrap();
                    assert!(
                        (h - soft).abs() <= 1e-4,
                        "omega={omega} q={q} b={b}: {h} vs {soft}"
                    );
                }
            }
        }
    }

    #[test]
    fn omega_zero_bound_examples() {
        assert_eq!(omega_zero_bound(1.0, 3.0).unwrap(), 3.0);
        let bound = omega_zero_bound(0.5, 2.0).unwrap();
        assert_relative_eq!(bound, 0.8399473665965821, max_relative = 1e-14);
        assert_eq!(omega_zero_bound(0.5, 0.0).unwrap(), 0.0);
        assert!(omega_zero_bound(1.5, 1.0).is_err());
        assert!(omega_zero_bound(0.0, 1.0).is_err());

        assert_eq!(brute_force_threshold(pt(0.85, 0.5), 2.0, 4.0, 100_000), 0.0);
        assert!(brute_force_threshold(pt(0.83, 0.5), 2.0, 4.0, 100_000) > 0.0);
        assert_eq!(threshold(pt(0.85, 0.5), 2.0).unwrap(), 0.0);
        assert!(threshold(pt(0.83, 0.5), 2.0).unwrap() > 0.0);
    }

    #[test]
    fn zero_bound_is_sharp() {
        for &q in &[0.1, 0.25, 0.5, 0.75, 0.9, 1.0] {
            for &b in &[-4.0, -0.5, 0.3, 2.0] {
                let bound = omega_zero_bound(q, b).unwrap();
                assert_eq!(threshold(pt(bound * 1.000001, q), b).unwrap(), 0.0);
                assert_ne!(threshold(pt(bound * 0.999999, q), b).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn q_tilde_examples() {
        // The bisection root sits where the crossover condition holds with equality.
        let q = q_tilde(0.5).unwrap();
        assert!((0.65..=0.70).contains(&q));
        // (3/4)·(2/3)^(1/4)·(2/3)^(3/4) = 1/2, so the root is exactly 2/3.
        assert!((q - 2.0 / 3.0).abs() < 1e-14);
        assert_eq!(q_tilde(1.0).unwrap(), 1.0);
        assert_eq!(q_tilde(4.0).unwrap(), 1.0);
        assert!(q_tilde(1e-12).unwrap() < 1e-6);
        assert!(q_tilde(0.0).is_err());
        assert!(q_tilde(-1.0).is_err());
    }

    #[test]
    fn q_tilde_separates_zero_and_nonzero() {
        for &ratio in &[0.05, 0.2, 0.45, 0.7, 0.95] {
            let qt = q_tilde(ratio).unwrap();
            let b = 2.0;
            let omega = ratio * b;
            if qt - 0.01 >= MIN_Q {
                assert_eq!(threshold(pt(omega, qt - 0.01), b).unwrap(), 0.0);
            }
            assert!(threshold(pt(omega, (qt + 0.01).min(1.0)), b).unwrap() > 0.0);
        }
    }

    #[test]
    fn lambda_conversion() {
        assert_eq!(lambda_equivalent(pt(1.0, 1.0)), 1.0);
        let l = lambda_equivalent(pt(2.0, 0.5));
        assert_relative_eq!(l, 5.656854249492381, max_relative = 1e-14);
        assert_relative_eq!(
            omega_from_lambda(l, 0.5).unwrap(),
            2.0,
            max_relative = 1e-14
        );
        assert_eq!(lambda_equivalent(pt(5.0, 2.0)), 0.5);
        assert!(omega_from_lambda(1.0, 2.0).is_err());
    }

    #[test]
    fn oracle_spot_check() {
        let point = pt(1.0, 0.7);
        let h = threshold(point, 3.0).unwrap();
        let bf = brute_force_threshold(point, 3.0, 4.0, 100_000);
        assert!((h - bf).abs() < 1e-6, "{h} vs {bf}");
    }
}
