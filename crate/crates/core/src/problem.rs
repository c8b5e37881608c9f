use nalgebra::{DMatrix, DVector};

use crate::error::{PowregError, Result};

/// Response and design with cached column statistics.
///
/// Immutable once built; concurrent solves may share one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    x: DMatrix<f64>,
    y: DVector<f64>,
    col_sq_norms: Vec<f64>,
    col_y_products: Vec<f64>,
}

impl ProblemInstance {
    pub fn new(x: DMatrix<f64>, y: DVector<f64>) -> Result<Self> {
        let (n, p) = x.shape();
        if n == 0 || p == 0 {
            return Err(PowregError::InvalidDataset(format!(
                "design must be non-empty, got {n}x{p}"
            )));
        }
        if y.len() != n {
            return Err(PowregError::DimensionMismatch {
                expected: n,
                found: y.len(),
            });
        }
        if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
            return Err(PowregError::InvalidDataset(
                "design and response must be finite".into(),
            ));
        }
        let mut col_sq_norms = Vec::with_capacity(p);
        let mut col_y_products = Vec::with_capacity(p);
        for j in 0..p {
            let col = x.column(j);
            let sq = col.dot(&col);
            if sq == 0.0 {
                return Err(PowregError::ZeroColumn { index: j });
            }
            col_sq_norms.push(sq);
            col_y_products.push(col.dot(&y));
        }
        Ok(Self {
            x,
            y,
            col_sq_norms,
            col_y_products,
        })
    }

    /// Builds from row-major data.
    pub fn from_rows(rows: &[Vec<f64>], y: &[f64]) -> Result<Self> {
        let n = rows.len();
        let p = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != p) {
            return Err(PowregError::InvalidDataset("ragged rows".into()));
        }
        let x = DMatrix::from_fn(n, p, |i, j| rows[i][j]);
        Self::new(x, DVector::from_column_slice(y))
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn y(&self) -> &DVector<f64> {
        &self.y
    }

    /// Column `j` as a contiguous slice.
    #[inline]
    pub fn column(&self, j: usize) -> &[f64] {
        let n = self.n();
        &self.x.as_slice()[j * n..(j + 1) * n]
    }

    pub fn col_sq_norms(&self) -> &[f64] {
        &self.col_sq_norms
    }

    pub fn col_y_products(&self) -> &[f64] {
        &self.col_y_products
    }

    /// `y − Xβ`.
    pub fn residual(&self, beta: &[f64]) -> Result<Vec<f64>> {
        self.check_len(beta.len())?;
        let mut r = self.y.as_slice().to_vec();
        for (j, &bj) in beta.iter().enumerate() {
            if bj != 0.0 {
                for (ri, xi) in r.iter_mut().zip(self.column(j)) {
                    *ri -= bj * xi;
                }
            }
        }
        Ok(r)
    }

    /// Same problem with columns reordered so that new column `k` is old column `perm[k]`.
    pub fn permute_columns(&self, perm: &[usize]) -> Result<Self> {
        self.check_len(perm.len())?;
        let x = DMatrix::from_fn(self.n(), self.p(), |i, k| self.x[(i, perm[k])]);
        Self::new(x, self.y.clone())
    }

    pub(crate) fn check_len(&self, len: usize) -> Result<()> {
        if len != self.p() {
            return Err(PowregError::DimensionMismatch {
                expected: self.p(),
                found: len,
            });
        }
        Ok(())
    }
}
