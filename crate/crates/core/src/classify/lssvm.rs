//! Dense LS-SVM dual solver.

use std::sync::Arc;

use rayon::prelude::*;

use super::kernel::{dist_sq_f32, dot_f32, KernelConfig};
use crate::error::{Error, Result};
use crate::Script;

/// Pivot ratios beyond this are reported as ill-conditioned.
const MAX_CONDITION: f64 = 1e14;

/// Training vectors stored row-major in single precision; shared by the
/// binary models of one multiclass model.
#[derive(Clone, Debug, PartialEq)]
pub struct SupportVectors {
    dim: usize,
    data: Vec<f32>,
}

impl SupportVectors {
    pub fn new(dim: usize, data: Vec<f32>) -> Result<Self> {
        if dim == 0 && !data.is_empty() || dim > 0 && !data.len().is_multiple_of(dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: data.len(),
            });
        }
        Ok(Self { dim, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(dim * rows.len());
        for r in rows {
            if r.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: r.len(),
                });
            }
            if r.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidParameter("non-finite training feature".into()));
            }
            data.extend(r.iter().map(|&v| v as f32));
        }
        Ok(Self { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        if self.dim == 0 {
            0
        } else {
            self.data.len() / self.dim
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    /// Rows at `idx`, in that order.
    pub fn select(&self, idx: &[usize]) -> SupportVectors {
        let mut data = Vec::with_capacity(idx.len() * self.dim);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        SupportVectors { dim: self.dim, data }
    }

    /// Kernel values of `x` against every row.
    pub fn kernel_row(&self, x: &[f32], k: &KernelConfig) -> Vec<f64> {
        (0..self.len()).map(|i| k.eval_f32(self.row(i), x)).collect()
    }
}

/// Symmetric pairwise dot products and squared distances, from which the
/// Gram matrix of any kernel follows without revisiting the vectors.
#[derive(Clone, Debug)]
pub struct PairTable {
    n: usize,
    dots: Vec<f64>,
    dists: Vec<f64>,
}

impl PairTable {
    pub fn new(sv: &SupportVectors) -> Self {
        let n = sv.len();
        let rows: Vec<(Vec<f64>, Vec<f64>)> = (0..n)
            .into_par_iter()
            .map(|i| {
                let a = sv.row(i);
                (0..n)
                    .map(|j| {
                        let b = sv.row(j);
                        (dot_f32(a, b), dist_sq_f32(a, b))
                    })
                    .unzip()
            })
            .collect();
        let mut dots = Vec::with_capacity(n * n);
        let mut dists = Vec::with_capacity(n * n);
        for (d, s) in rows {
            dots.extend(d);
            dists.extend(s);
        }
        Self { n, dots, dists }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Kernel matrix restricted to `rows × cols`.
    pub fn gram(&self, k: &KernelConfig, rows: &[usize], cols: &[usize]) -> Vec<f64> {
        let mut out = Vec::with_capacity(rows.len() * cols.len());
        for &i in rows {
            for &j in cols {
                out.push(k.from_parts(self.dots[i * self.n + j], self.dists[i * self.n + j]));
            }
        }
        out
    }
}

/// Cholesky factor of `K + I/reg`, reusable for any label vector.
#[derive(Clone, Debug)]
pub struct LsSvmSystem {
    n: usize,
    reg: f64,
    gram: Vec<f64>,
    chol: Vec<f64>,
    eta: Vec<f64>,
    eta_sum: f64,
}

impl LsSvmSystem {
    /// Factors `H = gram + I/reg`; `gram` is `n×n` row-major and symmetric.
    pub fn factor(gram: Vec<f64>, n: usize, reg: f64) -> Result<Self> {
        if gram.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                actual: gram.len(),
            });
        }
        if n == 0 {
            return Err(Error::InvalidParameter("empty training set".into()));
        }
        let mut l = vec![0.0; n * n];
        let (mut min_piv, mut max_piv) = (f64::INFINITY, 0.0f64);
        for i in 0..n {
            for j in 0..=i {
                let (li, lj) = (&l[i * n..i * n + j], &l[j * n..j * n + j]);
                let s: f64 = li.iter().zip(lj).map(|(a, b)| a * b).sum();
                let mut h = gram[i * n + j];
                if i == j {
                    h += 1.0 / reg;
                    let d = h - s;
                    if !(d > 0.0) || !d.is_finite() {
                        return Err(Error::IllConditioned {
                            condition: f64::INFINITY,
                        });
                    }
                    let p = d.sqrt();
                    min_piv = min_piv.min(p);
                    max_piv = max_piv.max(p);
                    l[i * n + i] = p;
                } else {
                    l[i * n + j] = (h - s) / l[j * n + j];
                }
            }
        }
        let condition = (max_piv / min_piv).powi(2);
        if condition > MAX_CONDITION {
            return Err(Error::IllConditioned { condition });
        }
        let mut sys = Self {
            n,
            reg,
            gram,
            chol: l,
            eta: Vec::new(),
            eta_sum: 0.0,
        };
        sys.eta = sys.solve_h(&vec![1.0; n]);
        sys.eta_sum = sys.eta.iter().sum();
        Ok(sys)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    fn h_times(&self, v: &[f64]) -> Vec<f64> {
        let n = self.n;
        (0..n)
            .map(|i| {
                let row = &self.gram[i * n..(i + 1) * n];
                row.iter().zip(v).map(|(a, b)| a * b).sum::<f64>() + v[i] / self.reg
            })
            .collect()
    }

    fn cholesky_solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.n;
        let l = &self.chol;
        let mut z = rhs.to_vec();
        for i in 0..n {
            let s: f64 = l[i * n..i * n + i].iter().zip(&z[..i]).map(|(a, b)| a * b).sum();
            z[i] = (z[i] - s) / l[i * n + i];
        }
        for i in (0..n).rev() {
            let mut s = z[i];
            for j in i + 1..n {
                s -= l[j * n + i] * z[j];
            }
            z[i] = s / l[i * n + i];
        }
        z
    }

    /// `H⁻¹ rhs` with one step of iterative refinement.
    fn solve_h(&self, rhs: &[f64]) -> Vec<f64> {
        let mut x = self.cholesky_solve(rhs);
        let hx = self.h_times(&x);
        let r: Vec<f64> = rhs.iter().zip(&hx).map(|(a, b)| a - b).collect();
        let dx = self.cholesky_solve(&r);
        for (xi, d) in x.iter_mut().zip(dx) {
            *xi += d;
        }
        x
    }

    /// Solves `[[0, 1ᵀ], [1, H]]·[b; α] = [0; y]`, returning `(α, b)`.
    pub fn solve(&self, y: &[f64]) -> Result<(Vec<f64>, f64)> {
        if y.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: y.len(),
            });
        }
        let nu = self.solve_h(y);
        let b = nu.iter().sum::<f64>() / self.eta_sum;
        let alpha = nu.iter().zip(&self.eta).map(|(v, e)| v - b * e).collect();
        Ok((alpha, b))
    }

    /// `‖A·[b; α] − [0; y]‖ / ‖y‖` for the full bordered system.
    pub fn residual(&self, alpha: &[f64], b: f64, y: &[f64]) -> f64 {
        let ha = self.h_times(alpha);
        let mut r2 = alpha.iter().sum::<f64>().powi(2);
        for i in 0..self.n {
            r2 += (b + ha[i] - y[i]).powi(2);
        }
        let y2: f64 = y.iter().map(|v| v * v).sum();
        (r2 / y2).sqrt()
    }
}

/// One one-vs-all decision function `f(x) = Σ αᵢ k(x, xᵢ) + b`.
#[derive(Clone, Debug)]
pub struct BinaryModel {
    pub script: Script,
    pub kernel: KernelConfig,
    pub alphas: Vec<f64>,
    pub bias: f64,
    pub support: Arc<SupportVectors>,
}

impl BinaryModel {
    pub fn decision(&self, x: &[f32]) -> Result<f64> {
        if x.len() != self.support.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.support.dim(),
                actual: x.len(),
            });
        }
        Ok(self.decision_from_row(&self.support.kernel_row(x, &self.kernel)))
    }

    pub(crate) fn decision_from_row(&self, krow: &[f64]) -> f64 {
        self.alphas.iter().zip(krow).map(|(a, k)| a * k).sum::<f64>() + self.bias
    }
}

/// Trains a binary LS-SVM on `±1` labels. `script` names the positive class.
pub fn train_lssvm(x: &[Vec<f64>], y: &[f64], k: KernelConfig, script: Script) -> Result<BinaryModel> {
    k.validate()?;
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            actual: y.len(),
        });
    }
    if !y.iter().any(|&v| v > 0.0) || !y.iter().any(|&v| v < 0.0) {
        return Err(Error::InsufficientClasses {
            found: usize::from(y.iter().any(|&v| v != 0.0)),
        });
    }
    let support = Arc::new(SupportVectors::from_rows(x)?);
    let all: Vec<usize> = (0..support.len()).collect();
    let gram = PairTable::new(&support).gram(&k, &all, &all);
    let sys = LsSvmSystem::factor(gram, all.len(), k.reg)?;
    let (alphas, bias) = sys.solve(y)?;
    Ok(BinaryModel {
        script,
        kernel: k,
        alphas,
        bias,
        support,
    })
}
