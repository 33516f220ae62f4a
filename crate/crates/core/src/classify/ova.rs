use std::sync::Arc;

use rayon::prelude::*;

use super::grid::{grid_search_prepared, Grid};
use super::kernel::KernelConfig;
use super::lssvm::{BinaryModel, LsSvmSystem, PairTable, SupportVectors};
use super::standardize::Standardizer;
use crate::error::{Error, Result};
use crate::features::ExtractorKind;
use crate::{Script, SCRIPT_COUNT};

/// Per-script decision values in the fixed script order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScoreVector(pub [f64; SCRIPT_COUNT]);

impl ScoreVector {
    pub fn get(&self, script: Script) -> f64 {
        self.0[script.index()]
    }

    /// Highest-scoring script; ties go to the lowest index.
    pub fn argmax(&self) -> Script {
        let mut best = 0;
        for i in 1..SCRIPT_COUNT {
            if self.0[i] > self.0[best] {
                best = i;
            }
        }
        Script::ALL[best]
    }
}

/// Thirteen one-vs-all models over a shared, standardized support set.
/// Scripts absent from training have no model and score `-inf`.
#[derive(Clone, Debug)]
pub struct MultiModel {
    pub(crate) kind: ExtractorKind,
    pub(crate) kernel: KernelConfig,
    pub(crate) standardizer: Standardizer,
    pub(crate) support: Arc<SupportVectors>,
    pub(crate) models: Vec<Option<BinaryModel>>,
}

impl MultiModel {
    pub fn kind(&self) -> ExtractorKind {
        self.kind
    }

    pub fn kernel(&self) -> KernelConfig {
        self.kernel
    }

    pub fn standardizer(&self) -> &Standardizer {
        &self.standardizer
    }

    pub fn model(&self, script: Script) -> Option<&BinaryModel> {
        self.models[script.index()].as_ref()
    }

    pub fn live_scripts(&self) -> Vec<Script> {
        Script::ALL
            .into_iter()
            .filter(|s| self.models[s.index()].is_some())
            .collect()
    }

    pub fn training_size(&self) -> usize {
        self.support.len()
    }

    pub(crate) fn from_models(
        kind: ExtractorKind,
        standardizer: Standardizer,
        models: Vec<Option<BinaryModel>>,
    ) -> Result<Self> {
        let first = models.iter().flatten().next().ok_or(Error::InsufficientClasses { found: 0 })?;
        let (kernel, support) = (first.kernel, first.support.clone());
        for m in models.iter().flatten() {
            if m.kernel != kernel || !(Arc::ptr_eq(&m.support, &support) || *m.support == *support) {
                return Err(Error::Format {
                    what: "model",
                    detail: "binary models disagree on kernel or support vectors".into(),
                });
            }
        }
        let models = models
            .into_iter()
            .map(|m| {
                m.map(|mut m| {
                    m.support = support.clone();
                    m
                })
            })
            .collect();
        Ok(Self {
            kind,
            kernel,
            standardizer,
            support,
            models,
        })
    }
}

/// Scores `x` against every script; null models give `-inf`.
pub fn predict(m: &MultiModel, x: &[f64]) -> Result<ScoreVector> {
    let z = m.standardizer.transform_f32(x)?;
    let krow = m.support.kernel_row(&z, &m.kernel);
    let mut s = [f64::NEG_INFINITY; SCRIPT_COUNT];
    for (slot, model) in s.iter_mut().zip(&m.models) {
        if let Some(b) = model {
            *slot = b.decision_from_row(&krow);
        }
    }
    Ok(ScoreVector(s))
}

/// Scores a batch in parallel; output order follows input order.
pub fn predict_many(m: &MultiModel, xs: &[Vec<f64>]) -> Result<Vec<ScoreVector>> {
    xs.par_iter().map(|x| predict(m, x)).collect()
}

/// Standardized training data with its pairwise table, shared by grid
/// search and final training.
pub(crate) struct Prepared {
    pub standardizer: Standardizer,
    pub support: Arc<SupportVectors>,
    pub pairs: PairTable,
    pub labels: Vec<Script>,
}

impl Prepared {
    pub fn new(x: &[Vec<f64>], labels: &[Script]) -> Result<Self> {
        if x.len() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                actual: labels.len(),
            });
        }
        let found = distinct(labels);
        if found < 2 {
            return Err(Error::InsufficientClasses { found });
        }
        let standardizer = Standardizer::fit(x)?;
        let rows = x.iter().map(|r| standardizer.transform(r)).collect::<Result<Vec<_>>>()?;
        let support = Arc::new(SupportVectors::from_rows(&rows)?);
        let pairs = PairTable::new(&support);
        Ok(Self {
            standardizer,
            support,
            pairs,
            labels: labels.to_vec(),
        })
    }
}

pub(crate) fn distinct(labels: &[Script]) -> usize {
    let mut seen = [false; SCRIPT_COUNT];
    for s in labels {
        seen[s.index()] = true;
    }
    seen.iter().filter(|&&b| b).count()
}

/// Solves all one-vs-all systems on the `train` subset with one shared
/// factorization. Returns `(alphas, bias)` per script present in `train`.
pub(crate) fn fit_ova_subset(
    pairs: &PairTable,
    labels: &[Script],
    train: &[usize],
    kernel: &KernelConfig,
) -> Result<Vec<Option<(Vec<f64>, f64)>>> {
    let gram = pairs.gram(kernel, train, train);
    let sys = LsSvmSystem::factor(gram, train.len(), kernel.reg)?;
    let mut present = [false; SCRIPT_COUNT];
    for &i in train {
        present[labels[i].index()] = true;
    }
    Script::ALL
        .iter()
        .map(|&s| {
            if !present[s.index()] {
                return Ok(None);
            }
            let y: Vec<f64> = train.iter().map(|&i| if labels[i] == s { 1.0 } else { -1.0 }).collect();
            sys.solve(&y).map(Some)
        })
        .collect()
}

fn assemble(kind: ExtractorKind, prep: Prepared, kernel: KernelConfig) -> Result<MultiModel> {
    let all: Vec<usize> = (0..prep.labels.len()).collect();
    let solved = fit_ova_subset(&prep.pairs, &prep.labels, &all, &kernel)?;
    let models = solved
        .into_iter()
        .zip(Script::ALL)
        .map(|(sol, script)| {
            sol.map(|(alphas, bias)| BinaryModel {
                script,
                kernel,
                alphas,
                bias,
                support: prep.support.clone(),
            })
        })
        .collect();
    Ok(MultiModel {
        kind,
        kernel,
        standardizer: prep.standardizer,
        support: prep.support,
        models,
    })
}

/// One-vs-all training with a fixed kernel.
pub fn train_ova(kind: ExtractorKind, x: &[Vec<f64>], labels: &[Script], kernel: KernelConfig) -> Result<MultiModel> {
    kernel.validate()?;
    assemble(kind, Prepared::new(x, labels)?, kernel)
}

/// One-vs-all training with the kernel chosen by 2-fold multiclass grid
/// search on the standardized training set.
pub fn train_ova_search(kind: ExtractorKind, x: &[Vec<f64>], labels: &[Script], grid: &Grid) -> Result<MultiModel> {
    let prep = Prepared::new(x, labels)?;
    let kernel = grid_search_prepared(&prep, grid)?;
    assemble(kind, prep, kernel)
}

fn zscore(s: &ScoreVector) -> [f64; SCRIPT_COUNT] {
    let finite: Vec<f64> = s.0.iter().copied().filter(|v| v.is_finite()).collect();
    if finite.is_empty() {
        return s.0;
    }
    let n = finite.len() as f64;
    let mean = finite.iter().sum::<f64>() / n;
    let std = (finite.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
    s.0.map(|v| {
        if !v.is_finite() {
            v
        } else if std == 0.0 {
            0.0
        } else {
            (v - mean) / std
        }
    })
}

/// Equal-weight fusion of two z-normalized score vectors. Statistics are
/// taken over finite entries; `-inf` entries stay `-inf`.
pub fn fuse_scores(s1: &ScoreVector, s2: &ScoreVector) -> ScoreVector {
    let (a, b) = (zscore(s1), zscore(s2));
    ScoreVector(std::array::from_fn(|i| 0.5 * a[i] + 0.5 * b[i]))
}
