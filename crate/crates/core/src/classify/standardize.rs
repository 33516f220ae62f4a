use crate::error::{Error, Result};

/// Per-dimension z-scoring fitted on a training set. Dimensions that are
/// constant over the training set are dropped.
#[derive(Clone, Debug, PartialEq)]
pub struct Standardizer {
    input_dim: usize,
    kept: Vec<usize>,
    mean: Vec<f64>,
    std: Vec<f64>,
}

impl Standardizer {
    pub fn fit(rows: &[Vec<f64>]) -> Result<Self> {
        let first = rows
            .first()
            .ok_or_else(|| Error::InvalidParameter("cannot standardize an empty training set".into()))?;
        let d = first.len();
        if let Some(r) = rows.iter().find(|r| r.len() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                actual: r.len(),
            });
        }
        let n = rows.len() as f64;
        let (mut kept, mut mean, mut std) = (Vec::new(), Vec::new(), Vec::new());
        for j in 0..d {
            let v0 = rows[0][j];
            if rows.iter().all(|r| r[j] == v0) {
                continue;
            }
            let m = rows.iter().map(|r| r[j]).sum::<f64>() / n;
            let var = rows.iter().map(|r| (r[j] - m).powi(2)).sum::<f64>() / n;
            kept.push(j);
            mean.push(m);
            std.push(var.sqrt());
        }
        Ok(Self {
            input_dim: d,
            kept,
            mean,
            std,
        })
    }

    pub(crate) fn from_parts(input_dim: usize, kept: Vec<usize>, mean: Vec<f64>, std: Vec<f64>) -> Result<Self> {
        if kept.len() != mean.len() || kept.len() != std.len() || kept.iter().any(|&k| k >= input_dim) {
            return Err(Error::Format {
                what: "standardizer",
                detail: "inconsistent dimension lists".into(),
            });
        }
        Ok(Self {
            input_dim,
            kept,
            mean,
            std,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.kept.len()
    }

    pub fn kept(&self) -> &[usize] {
        &self.kept
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn std(&self) -> &[f64] {
        &self.std
    }

    pub fn transform(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.input_dim {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim,
                actual: x.len(),
            });
        }
        Ok(self
            .kept
            .iter()
            .zip(self.mean.iter().zip(&self.std))
            .map(|(&j, (m, s))| (x[j] - m) / s)
            .collect())
    }

    pub fn transform_f32(&self, x: &[f64]) -> Result<Vec<f32>> {
        Ok(self.transform(x)?.into_iter().map(|v| v as f32).collect())
    }
}
