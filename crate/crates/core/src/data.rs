//! Dataset ingestion, centering/scaling, and synthetic instances.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{PowregError, Result};
use crate::problem::ProblemInstance;

/// Named numeric columns, one of which is the response.
#[derive(Debug, Clone, PartialEq)]
pub struct RawDataset {
    pub name: String,
    pub columns: Vec<(String, Vec<f64>)>,
    pub response_name: String,
}

impl RawDataset {
    pub fn new(
        name: impl Into<String>,
        columns: Vec<(String, Vec<f64>)>,
        response_name: impl Into<String>,
    ) -> Result<Self> {
        let raw = Self {
            name: name.into(),
            columns,
            response_name: response_name.into(),
        };
        raw.validate()?;
        Ok(raw)
    }

    fn validate(&self) -> Result<()> {
        let n = self.columns.first().map_or(0, |c| c.1.len());
        if n < 2 {
            return Err(PowregError::InvalidDataset(format!(
                "need at least 2 rows, got {n}"
            )));
        }
        if let Some((name, _)) = self.columns.iter().find(|c| c.1.len() != n) {
            return Err(PowregError::InvalidDataset(format!(
                "column {name:?} has a different length"
            )));
        }
        if !self.columns.iter().any(|c| c.0 == self.response_name) {
            return Err(PowregError::MissingResponse(self.response_name.clone()));
        }
        if self.columns.len() < 2 {
            return Err(PowregError::InvalidDataset("no covariate columns".into()));
        }
        for (name, values) in &self.columns {
            if values.iter().any(|v| !v.is_finite()) {
                return Err(PowregError::InvalidDataset(format!(
                    "column {name:?} has non-finite values"
                )));
            }
            if values.iter().all(|&v| v == values[0]) {
                return Err(PowregError::ConstantColumn(name.clone()));
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.columns[0].1.len()
    }

    pub fn p(&self) -> usize {
        self.columns.len() - 1
    }

    pub fn response(&self) -> &[f64] {
        self.columns
            .iter()
            .find(|c| c.0 == self.response_name)
            .map(|c| c.1.as_slice())
            .expect("validated on construction")
    }

    pub fn features(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.columns
            .iter()
            .filter(move |c| c.0 != self.response_name)
            .map(|c| (c.0.as_str(), c.1.as_slice()))
    }

    pub fn mean_abs_correlation(&self) -> Result<f64> {
        let cols: Vec<&[f64]> = self.features().map(|(_, v)| v).collect();
        mean_abs_correlation_of(&cols)
    }
}

/// Reads a comma-delimited file with a header row. Every cell must parse as a number.
pub fn load_csv(path: impl AsRef<Path>, response_name: &str) -> Result<RawDataset> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| PowregError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let headers: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
    if !headers.iter().any(|h| h == response_name) {
        return Err(PowregError::MissingResponse(response_name.to_owned()));
    }
    let mut values: Vec<Vec<f64>> = vec![Vec::new(); headers.len()];
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        for (k, cell) in record.iter().enumerate() {
            let v: f64 = cell.parse().map_err(|_| PowregError::NonNumeric {
                row: row + 1,
                column: headers[k].clone(),
                value: cell.to_owned(),
            })?;
            values[k].push(v);
        }
    }
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".into());
    RawDataset::new(
        name,
        headers.into_iter().zip(values).collect(),
        response_name,
    )
}

/// Centered and scaled problem plus the transforms needed to map back.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardizedDataset {
    pub name: String,
    pub problem: ProblemInstance,
    pub feature_names: Vec<String>,
    pub response_name: String,
    pub y_center: f64,
    pub y_scale: f64,
    pub x_centers: Vec<f64>,
    pub x_scales: Vec<f64>,
}

fn center_scale(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn standardized(v: &[f64], name: &str) -> Result<(Vec<f64>, f64, f64)> {
    let (mean, sd) = center_scale(v);
    if !(sd > 0.0) {
        return Err(PowregError::ConstantColumn(name.to_owned()));
    }
    let mut out: Vec<f64> = v.iter().map(|x| (x - mean) / sd).collect();
    // A second pass removes the rounding left by the first.
    let (m2, s2) = center_scale(&out);
    for x in &mut out {
        *x = (*x - m2) / s2;
    }
    Ok((out, mean + m2 * sd, sd * s2))
}

/// Centers every column and the response to mean 0 and scales to unit sample
/// standard deviation (denominator `n − 1`).
pub fn standardize(raw: &RawDataset) -> Result<StandardizedDataset> {
    let n = raw.n();
    let (y, y_center, y_scale) = standardized(raw.response(), &raw.response_name)?;
    let mut feature_names = Vec::with_capacity(raw.p());
    let mut x_centers = Vec::with_capacity(raw.p());
    let mut x_scales = Vec::with_capacity(raw.p());
    let mut data = Vec::with_capacity(n * raw.p());
    for (name, col) in raw.features() {
        let (z, c, s) = standardized(col, name)?;
        feature_names.push(name.to_owned());
        x_centers.push(c);
        x_scales.push(s);
        data.extend(z);
    }
    let x = DMatrix::from_vec(n, feature_names.len(), data);
    let problem = ProblemInstance::new(x, DVector::from_vec(y))?;
    Ok(StandardizedDataset {
        name: raw.name.clone(),
        problem,
        feature_names,
        response_name: raw.response_name.clone(),
        y_center,
        y_scale,
        x_centers,
        x_scales,
    })
}

impl StandardizedDataset {
    /// Maps standardized coefficients to `(intercept, slopes)` in original units.
    pub fn to_original_scale(&self, beta: &[f64]) -> Result<(f64, Vec<f64>)> {
        self.problem.check_len(beta.len())?;
        let slopes: Vec<f64> = beta
            .iter()
            .zip(&self.x_scales)
            .map(|(b, s)| self.y_scale * b / s)
            .collect();
        let intercept = self.y_center
            - slopes
                .iter()
                .zip(&self.x_centers)
                .map(|(b, c)| b * c)
                .sum::<f64>();
        Ok((intercept, slopes))
    }

    /// The standardized values as a raw dataset.
    pub fn to_raw(&self) -> RawDataset {
        let p = self.problem.p();
        let mut columns: Vec<(String, Vec<f64>)> = (0..p)
            .map(|j| {
                (
                    self.feature_names[j].clone(),
                    self.problem.column(j).to_vec(),
                )
            })
            .collect();
        columns.push((
            self.response_name.clone(),
            self.problem.y().as_slice().to_vec(),
        ));
        RawDataset {
            name: self.name.clone(),
            columns,
            response_name: self.response_name.clone(),
        }
    }

    pub fn mean_abs_correlation(&self) -> Result<f64> {
        let cols: Vec<&[f64]> = (0..self.problem.p())
            .map(|j| self.problem.column(j))
            .collect();
        mean_abs_correlation_of(&cols)
    }
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let (ma, _) = center_scale(a);
    let (mb, _) = center_scale(b);
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    sab / (saa * sbb).sqrt()
}

/// `(1/(p(p−1)))·Σ_{i≠j}|cor(xᵢ, xⱼ)|`.
pub fn mean_abs_correlation_of(columns: &[&[f64]]) -> Result<f64> {
    let p = columns.len();
    if p < 2 {
        return Err(PowregError::InvalidDataset(format!(
            "mean absolute correlation needs p >= 2, got {p}"
        )));
    }
    let mut total = 0.0;
    for i in 0..p {
        for j in (i + 1)..p {
            let r = pearson(columns[i], columns[j]);
            if !r.is_finite() {
                return Err(PowregError::InvalidDataset(
                    "correlation undefined for a zero-variance column".into(),
                ));
            }
            total += 2.0 * r.abs();
        }
    }
    Ok(total / (p * (p - 1)) as f64)
}

/// Parameters of a synthetic instance.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SynthSpec {
    pub seed: u64,
    pub n: usize,
    pub p: usize,
    pub sparsity: usize,
    pub rho: f64,
    pub noise_sd: f64,
}

impl SynthSpec {
    pub fn build(&self) -> Result<StandardizedDataset> {
        synth_instance(
            self.seed,
            self.n,
            self.p,
            self.sparsity,
            self.rho,
            self.noise_sd,
        )
    }

    pub fn label(&self) -> String {
        format!(
            "synth-s{}-n{}-p{}-k{}-rho{}-sd{}",
            self.seed, self.n, self.p, self.sparsity, self.rho, self.noise_sd
        )
    }
}

/// Equicorrelated Gaussian design, `xᵢⱼ = √ρ·zᵢ + √(1−ρ)·eᵢⱼ`, true
/// coefficients `+1, −1, +1, …` on the first `sparsity` columns, and
/// `y = Xβ + noise_sd·ε`. The result is standardized.
pub fn synth_instance(
    seed: u64,
    n: usize,
    p: usize,
    sparsity: usize,
    correlation_rho: f64,
    noise_sd: f64,
) -> Result<StandardizedDataset> {
    let spec = SynthSpec {
        seed,
        n,
        p,
        sparsity,
        rho: correlation_rho,
        noise_sd,
    };
    if n < 2 || p < 1 {
        return Err(PowregError::InvalidConfig(format!(
            "synthetic instance needs n >= 2 and p >= 1, got n={n}, p={p}"
        )));
    }
    if sparsity > p {
        return Err(PowregError::InvalidConfig(format!(
            "sparsity {sparsity} exceeds p = {p}"
        )));
    }
    if !(0.0..1.0).contains(&correlation_rho) {
        return Err(PowregError::InvalidConfig(format!(
            "rho must lie in [0, 1), got {correlation_rho}"
        )));
    }
    if !(noise_sd >= 0.0) || !noise_sd.is_finite() {
        return Err(PowregError::InvalidConfig(format!(
            "noise_sd must be finite and >= 0, got {noise_sd}"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut normal = || -> f64 { StandardNormal.sample(&mut rng) };
    let shared_w = correlation_rho.sqrt();
    let own_w = (1.0 - correlation_rho).sqrt();

    let mut rows = vec![vec![0.0; p]; n];
    for row in rows.iter_mut() {
        let z = normal();
        for v in row.iter_mut() {
            *v = shared_w * z + own_w * normal();
        }
    }
    let truth: Vec<f64> = (0..p)
        .map(|j| match j {
            j if j >= sparsity => 0.0,
            j if j % 2 == 0 => 1.0,
            _ => -1.0,
        })
        .collect();
    let y: Vec<f64> = rows
        .iter()
        .map(|row| row.iter().zip(&truth).map(|(x, b)| x * b).sum::<f64>() + noise_sd * normal())
        .collect();

    let mut columns: Vec<(String, Vec<f64>)> = (0..p)
        .map(|j| (format!("x{}", j + 1), rows.iter().map(|r| r[j]).collect()))
        .collect();
    columns.push(("y".into(), y));
    let raw = RawDataset::new(spec.label(), columns, "y")?;
    standardize(&raw)
}
