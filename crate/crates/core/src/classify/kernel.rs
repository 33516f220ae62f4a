use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum KernelKind {
    Linear,
    Rbf { gamma: f64 },
}

/// Kernel plus the LS-SVM regularization constant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelConfig {
    pub kind: KernelKind,
    pub reg: f64,
}

impl KernelConfig {
    pub fn linear(reg: f64) -> Self {
        Self {
            kind: KernelKind::Linear,
            reg,
        }
    }

    pub fn rbf(gamma: f64, reg: f64) -> Self {
        Self {
            kind: KernelKind::Rbf { gamma },
            reg,
        }
    }

    pub fn gamma(&self) -> Option<f64> {
        match self.kind {
            KernelKind::Linear => None,
            KernelKind::Rbf { gamma } => Some(gamma),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.reg > 0.0 && self.reg.is_finite()) {
            return Err(Error::InvalidParameter(format!("reg must be positive, got {}", self.reg)));
        }
        if let KernelKind::Rbf { gamma } = self.kind {
            if !(gamma > 0.0 && gamma.is_finite()) {
                return Err(Error::InvalidParameter(format!("gamma must be positive, got {gamma}")));
            }
        }
        Ok(())
    }

    /// Kernel value from the dot product and squared distance of two vectors.
    pub(crate) fn from_parts(&self, dot: f64, dist_sq: f64) -> f64 {
        match self.kind {
            KernelKind::Linear => dot,
            KernelKind::Rbf { gamma } => (-gamma * dist_sq).exp(),
        }
    }

    pub(crate) fn eval_f32(&self, a: &[f32], b: &[f32]) -> f64 {
        match self.kind {
            KernelKind::Linear => dot_f32(a, b),
            KernelKind::Rbf { gamma } => (-gamma * dist_sq_f32(a, b)).exp(),
        }
    }
}

impl fmt::Display for KernelConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            KernelKind::Linear => write!(f, "linear(reg={})", self.reg),
            KernelKind::Rbf { gamma } => write!(f, "rbf(gamma={gamma}, reg={})", self.reg),
        }
    }
}

pub(crate) fn dot_f32(a: &[f32], b: &[f32]) -> f64 {
    a.iter().zip(b).map(|(&x, &y)| x as f64 * y as f64).sum()
}

pub(crate) fn dist_sq_f32(a: &[f32], b: &[f32]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let d = x as f64 - y as f64;
            d * d
        })
        .sum()
}

/// `a·b` for linear kernels, `exp(-gamma·|a-b|²)` for RBF.
pub fn kernel(a: &[f64], b: &[f64], k: &KernelConfig) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    Ok(match k.kind {
        KernelKind::Linear => a.iter().zip(b).map(|(x, y)| x * y).sum(),
        KernelKind::Rbf { gamma } => {
            let d: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
            (-gamma * d).exp()
        }
    })
}
