//! Plot-ready samples of the thresholding function.

use serde::{Deserialize, Serialize};

use crate::error::{PowregError, Result};
use crate::threshold::{alpha, gamma, PenaltyPoint, Thresholder};

/// Which parameter is held fixed while the other one varies across curves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum CurveFamily {
    FixedOmega { omega: f64, qs: Vec<f64> },
    FixedQ { q: f64, omegas: Vec<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub b: f64,
    pub q: f64,
    pub omega: f64,
    pub h: f64,
}

impl CurveFamily {
    fn points(&self) -> Result<Vec<PenaltyPoint>> {
        match self {
            CurveFamily::FixedOmega { omega, qs } => {
                qs.iter().map(|&q| PenaltyPoint::new(*omega, q)).collect()
            }
            CurveFamily::FixedQ { q, omegas } => {
                omegas.iter().map(|&w| PenaltyPoint::new(w, *q)).collect()
            }
        }
    }
}

/// Evaluates `h` on `points` equally spaced `b` values in `[b_min, b_max]` for
/// every member of the family.
///
/// For `q < 1` with `±α` inside the range, two extra rows are emitted at
/// `b = ±α`, one with `h = 0` and one with `h = ±γ`, so the jump shows up
/// when the curve is drawn.
pub fn threshold_curve(
    family: &CurveFamily,
    b_min: f64,
    b_max: f64,
    points: usize,
) -> Result<Vec<CurveRow>> {
    if !(b_min.is_finite() && b_max.is_finite()) || b_min > b_max {
        return Err(PowregError::InvalidGrid(format!(
            "invalid b range [{b_min}, {b_max}]"
        )));
    }
    if points == 1 && b_min != b_max {
        return Err(PowregError::InvalidGrid(
            "a single point needs b_min == b_max".into(),
        ));
    }
    let mut rows = Vec::new();
    if points == 0 {
        return Ok(rows);
    }
    let bs: Vec<f64> = (0..points)
        .map(|i| {
            if points == 1 {
                b_min
            } else if i == points - 1 {
                b_max
            } else {
                b_min + (b_max - b_min) * i as f64 / (points - 1) as f64
            }
        })
        .collect();

    for point in family.points()? {
        let thresholder = Thresholder::new(point);
        let mut curve: Vec<CurveRow> = bs
            .iter()
            .map(|&b| {
                Ok(CurveRow {
                    b,
                    q: point.q(),
                    omega: point.omega(),
                    h: thresholder.apply(b)?,
                })
            })
            .collect::<Result<_>>()?;
        if point.q() < 1.0 && point.omega() > 0.0 {
            let a = alpha(point)?;
            let g = gamma(point)?;
            for sign in [-1.0, 1.0] {
                let b = sign * a;
                if b >= b_min && b <= b_max {
                    // Ordered so that the line runs through the jump left to right.
                    let (first, second) = if sign < 0.0 { (-g, 0.0) } else { (0.0, g) };
                    for h in [first, second] {
                        curve.push(CurveRow {
                            b,
                            q: point.q(),
                            omega: point.omega(),
                            h,
                        });
                    }
                }
            }
            curve.sort_by(|l, r| l.b.total_cmp(&r.b));
        }
        rows.extend(curve);
    }
    Ok(rows)
}
