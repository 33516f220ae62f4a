//! 2-fold grid search over kernel hyper-parameters.

use super::kernel::KernelConfig;
use super::lssvm::{LsSvmSystem, PairTable, SupportVectors};
use super::ova::{distinct, fit_ova_subset, Prepared};
use crate::error::{Error, Result};
use crate::{Script, SCRIPT_COUNT};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelFamily {
    Linear,
    Rbf,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    pub family: KernelFamily,
    /// Ignored for linear kernels.
    pub gammas: Vec<f64>,
    pub regs: Vec<f64>,
}

fn powers_of_two(from: i32, to: i32, step: usize) -> Vec<f64> {
    (from..=to).step_by(step).map(|e| 2f64.powi(e)).collect()
}

impl Grid {
    /// gamma ∈ {2⁻¹⁵, 2⁻¹², …, 2³}, reg ∈ {2⁻³, 2⁰, …, 2¹²}.
    pub fn standard(family: KernelFamily) -> Self {
        Self {
            family,
            gammas: powers_of_two(-15, 3, 3),
            regs: powers_of_two(-3, 12, 3),
        }
    }

    pub fn fixed(k: KernelConfig) -> Self {
        match k.gamma() {
            Some(g) => Self {
                family: KernelFamily::Rbf,
                gammas: vec![g],
                regs: vec![k.reg],
            },
            None => Self {
                family: KernelFamily::Linear,
                gammas: Vec::new(),
                regs: vec![k.reg],
            },
        }
    }

    /// Candidates in tie-break order: ascending reg, then ascending gamma.
    pub fn candidates(&self) -> Vec<KernelConfig> {
        let mut regs = self.regs.clone();
        regs.sort_by(f64::total_cmp);
        let mut gammas = self.gammas.clone();
        gammas.sort_by(f64::total_cmp);
        let mut out = Vec::new();
        for &r in &regs {
            match self.family {
                KernelFamily::Linear => out.push(KernelConfig::linear(r)),
                KernelFamily::Rbf => out.extend(gammas.iter().map(|&g| KernelConfig::rbf(g, r))),
            }
        }
        out
    }
}

/// Even positions form fold A, odd positions fold B.
pub fn fold_split(n: usize) -> (Vec<usize>, Vec<usize>) {
    ((0..n).step_by(2).collect(), (1..n).step_by(2).collect())
}

fn best_of(candidates: Vec<KernelConfig>, mut score: impl FnMut(&KernelConfig) -> Result<f64>) -> Result<KernelConfig> {
    let mut best: Option<(f64, KernelConfig)> = None;
    let mut last_err = None;
    for k in candidates {
        k.validate()?;
        match score(&k) {
            Ok(acc) => {
                if best.is_none_or(|(b, _)| acc > b) {
                    best = Some((acc, k));
                }
            }
            Err(e @ Error::IllConditioned { .. }) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    match (best, last_err) {
        (Some((_, k)), _) => Ok(k),
        (None, Some(e)) => Err(e),
        (None, None) => Err(Error::InvalidParameter("empty grid".into())),
    }
}

/// Binary grid search: maximizes mean 2-fold accuracy of the sign of the
/// decision function.
pub fn grid_search(x: &[Vec<f64>], y: &[f64], grid: &Grid) -> Result<KernelConfig> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            actual: y.len(),
        });
    }
    if x.len() < 4 {
        return Err(Error::DegenerateFolds(format!("{} samples, need at least 4", x.len())));
    }
    let (a, b) = fold_split(x.len());
    for (name, fold) in [("A", &a), ("B", &b)] {
        if !fold.iter().any(|&i| y[i] > 0.0) || !fold.iter().any(|&i| y[i] < 0.0) {
            return Err(Error::DegenerateFolds(format!("fold {name} lacks one of the two labels")));
        }
    }
    let pairs = PairTable::new(&SupportVectors::from_rows(x)?);
    best_of(grid.candidates(), |k| {
        let mut acc = 0.0;
        for (train, test) in [(&a, &b), (&b, &a)] {
            let sys = LsSvmSystem::factor(pairs.gram(k, train, train), train.len(), k.reg)?;
            let yt: Vec<f64> = train.iter().map(|&i| y[i]).collect();
            let (alpha, bias) = sys.solve(&yt)?;
            let cross = pairs.gram(k, test, train);
            let correct = test
                .iter()
                .enumerate()
                .filter(|&(r, &i)| {
                    let row = &cross[r * train.len()..(r + 1) * train.len()];
                    let f: f64 = row.iter().zip(&alpha).map(|(k, a)| k * a).sum::<f64>() + bias;
                    (f >= 0.0) == (y[i] > 0.0)
                })
                .count();
            acc += correct as f64 / test.len() as f64;
        }
        Ok(acc / 2.0)
    })
}

/// Multiclass variant: mean 2-fold rank-1 accuracy of the one-vs-all argmax.
pub(crate) fn grid_search_prepared(prep: &Prepared, grid: &Grid) -> Result<KernelConfig> {
    let candidates = grid.candidates();
    if candidates.len() == 1 {
        return Ok(candidates[0]);
    }
    let labels = &prep.labels;
    let (a, b) = fold_split(labels.len());
    for (name, fold) in [("A", &a), ("B", &b)] {
        let fl: Vec<Script> = fold.iter().map(|&i| labels[i]).collect();
        if distinct(&fl) < 2 {
            return Err(Error::DegenerateFolds(format!("fold {name} has fewer than two scripts")));
        }
    }
    best_of(candidates, |k| {
        let mut acc = 0.0;
        for (train, test) in [(&a, &b), (&b, &a)] {
            let solved = fit_ova_subset(&prep.pairs, labels, train, k)?;
            let cross = prep.pairs.gram(k, test, train);
            let mut correct = 0usize;
            for (r, &i) in test.iter().enumerate() {
                let row = &cross[r * train.len()..(r + 1) * train.len()];
                let mut best = (f64::NEG_INFINITY, usize::MAX);
                for (s, sol) in solved.iter().enumerate().take(SCRIPT_COUNT) {
                    if let Some((alpha, bias)) = sol {
                        let f = row.iter().zip(alpha).map(|(k, a)| k * a).sum::<f64>() + bias;
                        if best.1 == usize::MAX || f > best.0 {
                            best = (f, s);
                        }
                    }
                }
                if best.1 == labels[i].index() {
                    correct += 1;
                }
            }
            acc += correct as f64 / test.len() as f64;
        }
        Ok(acc / 2.0)
    })
}
