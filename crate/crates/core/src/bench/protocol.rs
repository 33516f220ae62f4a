//! Benchmarks, task definitions and the evaluation loop.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;

use super::metrics::{aggregate_document, cmc, confusion, hit_ratio, weighted_diagonal, ConfusionMatrix};
use super::split::SplitSpec;
use crate::classify::{fuse_scores, predict, train_ova_search, Grid, KernelConfig, KernelFamily, MultiModel, ScoreVector};
use crate::corpus::{Level, Manifest, ManifestRecord, Modality};
use crate::error::{Error, Result};
use crate::features::{ExtractorKind, ExtractorRegistry, FeatureExtractor};
use crate::imagecore::io::read_png;
use crate::imagecore::{binarize, equalize_ink, BinaryImage, RasterImage, DEFAULT_SENSITIVITY, DEFAULT_WINDOW};
use crate::segmentation::segment_lines;
use crate::{Script, SCRIPT_COUNT};

/// A feature pipeline plus the rule that turns its per-extractor scores
/// into one score vector.
pub trait Benchmark: Send + Sync {
    fn id(&self) -> u32;
    fn name(&self) -> &str;
    fn extractors(&self) -> Vec<ExtractorKind>;
    fn kernel_family(&self, kind: ExtractorKind) -> KernelFamily;
    fn combine(&self, scores: &[ScoreVector]) -> ScoreVector;
}

/// Zoned LBP and quad-tree HOT, fused 50/50.
pub struct LbpHotFusion;

impl Benchmark for LbpHotFusion {
    fn id(&self) -> u32 {
        1
    }

    fn name(&self) -> &str {
        "lbp-hot"
    }

    fn extractors(&self) -> Vec<ExtractorKind> {
        vec![ExtractorKind::Lbp255, ExtractorKind::Hot200]
    }

    fn kernel_family(&self, _: ExtractorKind) -> KernelFamily {
        KernelFamily::Rbf
    }

    fn combine(&self, scores: &[ScoreVector]) -> ScoreVector {
        fuse_scores(&scores[0], &scores[1])
    }
}

/// Dense multi-block LBP alone.
pub struct DenseMbLbpOnly;

impl Benchmark for DenseMbLbpOnly {
    fn id(&self) -> u32 {
        2
    }

    fn name(&self) -> &str {
        "dmb"
    }

    fn extractors(&self) -> Vec<ExtractorKind> {
        vec![ExtractorKind::Dmb10240]
    }

    fn kernel_family(&self, _: ExtractorKind) -> KernelFamily {
        KernelFamily::Linear
    }

    fn combine(&self, scores: &[ScoreVector]) -> ScoreVector {
        scores[0]
    }
}

/// Benchmarks by name; numeric ids resolve too.
#[derive(Clone, Default)]
pub struct BenchmarkRegistry {
    entries: BTreeMap<String, Arc<dyn Benchmark>>,
}

impl BenchmarkRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn standard() -> Self {
        let mut r = Self::new();
        r.register(LbpHotFusion);
        r.register(DenseMbLbpOnly);
        r
    }

    pub fn register<B: Benchmark + 'static>(&mut self, b: B) {
        self.entries.insert(b.name().to_string(), Arc::new(b));
    }

    pub fn get(&self, key: &str) -> Result<Arc<dyn Benchmark>> {
        if let Some(b) = self.entries.get(key) {
            return Ok(b.clone());
        }
        self.entries
            .values()
            .find(|b| b.id().to_string() == key)
            .cloned()
            .ok_or_else(|| Error::InvalidParameter(format!("unknown benchmark {key:?}")))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Task {
    PerType,
    PerModality,
    Single,
}

impl Task {
    pub const ALL: [Task; 3] = [Task::PerType, Task::PerModality, Task::Single];

    pub fn number(self) -> u32 {
        match self {
            Task::PerType => 1,
            Task::PerModality => 2,
            Task::Single => 3,
        }
    }

    pub fn from_number(n: u32) -> Option<Task> {
        Task::ALL.into_iter().find(|t| t.number() == n)
    }

    /// Training configurations in report row order.
    pub fn configs(self) -> Vec<TrainConfig> {
        let level_name = |l: Level| match l {
            Level::Doc => "docs",
            Level::Line => "lines",
            Level::Word => "words",
        };
        match self {
            Task::PerType => TEST_TYPES
                .iter()
                .map(|&(m, l)| TrainConfig {
                    label: format!("{m}_{}", level_name(l)),
                    cells: vec![(l, m)],
                })
                .collect(),
            Task::PerModality => Modality::ALL
                .iter()
                .map(|&m| TrainConfig {
                    label: format!("{m}_all"),
                    cells: Level::ALL.iter().map(|&l| (l, m)).collect(),
                })
                .collect(),
            Task::Single => vec![TrainConfig {
                label: "all".into(),
                cells: TEST_TYPES.iter().map(|&(m, l)| (l, m)).collect(),
            }],
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

impl FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.parse()
            .ok()
            .and_then(Task::from_number)
            .ok_or_else(|| Error::InvalidParameter(format!("task must be 1, 2 or 3, got {s:?}")))
    }
}

/// Report column order.
pub const TEST_TYPES: [(Modality, Level); 6] = [
    (Modality::Handwritten, Level::Doc),
    (Modality::Handwritten, Level::Line),
    (Modality::Handwritten, Level::Word),
    (Modality::Printed, Level::Doc),
    (Modality::Printed, Level::Line),
    (Modality::Printed, Level::Word),
];

pub fn test_type_label(m: Modality, l: Level) -> String {
    let l = match l {
        Level::Doc => "docs",
        Level::Line => "lines",
        Level::Word => "words",
    };
    format!("{m}_{l}")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrainConfig {
    pub label: String,
    pub cells: Vec<(Level, Modality)>,
}

/// Score of one test sample.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleResult {
    pub record: usize,
    pub truth: Script,
    pub scores: ScoreVector,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TestOutcome {
    pub modality: Modality,
    pub level: Level,
    pub confusion: ConfusionMatrix,
    pub hit_ratio: f64,
    pub weighted_diagonal: f64,
    pub cmc: [f64; SCRIPT_COUNT],
    pub samples: Vec<SampleResult>,
}

/// One training configuration tested on the six test types. Cells are
/// `None` when no model or no test samples exist for them.
#[derive(Clone, Debug)]
pub struct EvalReport {
    pub task: Task,
    pub benchmark: String,
    pub train: TrainConfig,
    pub kernels: Vec<(ExtractorKind, KernelConfig)>,
    pub training_vectors: usize,
    pub tests: Vec<Option<TestOutcome>>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunOptions {
    /// Replace the standard gamma list.
    pub gammas: Option<Vec<f64>>,
    /// Replace the standard regularization list.
    pub regs: Option<Vec<f64>>,
}

impl RunOptions {
    pub fn grid(&self, family: KernelFamily) -> Grid {
        let mut g = Grid::standard(family);
        if let Some(v) = &self.gammas {
            g.gammas = v.clone();
        }
        if let Some(v) = &self.regs {
            g.regs = v.clone();
        }
        g
    }
}

/// Binarize, equalize ink, then run each extractor.
pub fn sample_features(img: &RasterImage, extractors: &[Arc<dyn FeatureExtractor>]) -> Result<Vec<Vec<f64>>> {
    let fg = binarize(img, DEFAULT_WINDOW, DEFAULT_SENSITIVITY)?;
    preprocessed_features(&fg, extractors)
}

fn preprocessed_features(fg: &BinaryImage, extractors: &[Arc<dyn FeatureExtractor>]) -> Result<Vec<Vec<f64>>> {
    let eq = equalize_ink(fg)?;
    extractors
        .iter()
        .map(|e| e.extract(&eq, fg).map(|v| v.into_values()))
        .collect()
}

/// Features of every unit a sample contributes: the sample itself for
/// lines and words, its lines for documents.
struct FeatureStore {
    units: HashMap<usize, Vec<Arc<Vec<Vec<f64>>>>>,
}

impl FeatureStore {
    fn build(manifest: &Manifest, records: &BTreeSet<usize>, extractors: &[Arc<dyn FeatureExtractor>]) -> Result<Self> {
        let recs = manifest.records();
        let mut images: BTreeSet<PathBuf> = BTreeSet::new();
        let mut plan: Vec<(usize, Vec<PathBuf>)> = Vec::new();
        let mut fallback: Vec<usize> = Vec::new();
        for &i in records {
            let r = &recs[i];
            if r.level() == Level::Doc {
                let lines: Vec<PathBuf> = manifest
                    .lines_of(r.script(), r.modality, r.name.doc)
                    .into_iter()
                    .map(|l| l.path.clone())
                    .collect();
                if lines.is_empty() {
                    fallback.push(i);
                } else {
                    images.extend(lines.iter().cloned());
                    plan.push((i, lines));
                }
            } else {
                images.insert(r.path.clone());
                plan.push((i, vec![r.path.clone()]));
            }
        }
        let images: Vec<PathBuf> = images.into_iter().collect();
        let computed: Vec<Result<Vec<Vec<f64>>>> = images
            .par_iter()
            .map(|p| sample_features(&read_png(p, None)?, extractors))
            .collect();
        let mut by_path = HashMap::with_capacity(images.len());
        for (p, f) in images.into_iter().zip(computed) {
            by_path.insert(p, Arc::new(f?));
        }
        let mut units = HashMap::new();
        for (i, paths) in plan {
            units.insert(i, paths.iter().map(|p| by_path[p].clone()).collect());
        }
        let segmented: Vec<Result<Vec<Arc<Vec<Vec<f64>>>>>> = fallback
            .par_iter()
            .map(|&i| segmented_line_features(&recs[i], extractors))
            .collect();
        for (i, f) in fallback.into_iter().zip(segmented) {
            units.insert(i, f?);
        }
        Ok(Self { units })
    }

    fn units(&self, record: usize) -> &[Arc<Vec<Vec<f64>>>] {
        &self.units[&record]
    }
}

fn segmented_line_features(
    r: &ManifestRecord,
    extractors: &[Arc<dyn FeatureExtractor>],
) -> Result<Vec<Arc<Vec<Vec<f64>>>>> {
    let page = read_png(&r.path, None)?;
    let bin = binarize(&page, DEFAULT_WINDOW, DEFAULT_SENSITIVITY)?;
    let lines = segment_lines(&bin);
    if lines.is_empty() {
        return Err(Error::BlankImage);
    }
    lines
        .iter()
        .map(|l| sample_features(&l.render_gray(&page), extractors).map(Arc::new))
        .collect()
}

/// Every (script, level, modality) combination of the manifest's scripts
/// and modalities must be split.
fn check_coverage(manifest: &Manifest, splits: &SplitSpec) -> Result<()> {
    let mut missing = Vec::new();
    for s in manifest.scripts() {
        for m in manifest.modalities() {
            for l in Level::ALL {
                if splits.get(s, l, m).is_none() {
                    missing.push((s, l, m));
                }
            }
        }
    }
    if missing.is_empty() {
        Ok(())
    } else {
        Err(Error::MissingCells(missing))
    }
}

fn score_sample(
    bench: &dyn Benchmark,
    models: &[MultiModel],
    units: &[Arc<Vec<Vec<f64>>>],
) -> Result<ScoreVector> {
    let per_kind = models
        .iter()
        .enumerate()
        .map(|(k, m)| {
            let lines = units.iter().map(|u| predict(m, &u[k])).collect::<Result<Vec<_>>>()?;
            aggregate_document(&lines)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(bench.combine(&per_kind))
}

/// Models of one training configuration, one per benchmark extractor; empty
/// when the configuration has no training samples.
#[derive(Clone, Debug)]
pub struct TrainedConfig {
    pub config: TrainConfig,
    pub models: Vec<MultiModel>,
    pub training_vectors: usize,
}

fn prepare(
    bench: &dyn Benchmark,
    manifest: &Manifest,
    splits: &SplitSpec,
    with_tests: bool,
) -> Result<FeatureStore> {
    check_coverage(manifest, splits)?;
    splits.check_disjoint(manifest)?;
    let registry = ExtractorRegistry::standard();
    let extractors = bench
        .extractors()
        .iter()
        .map(|&k| registry.by_kind(k))
        .collect::<Result<Vec<_>>>()?;
    let mut needed = BTreeSet::new();
    for cell in splits.cells.values() {
        needed.extend(cell.train.iter().copied());
        if with_tests {
            needed.extend(cell.test.iter().copied());
        }
    }
    FeatureStore::build(manifest, &needed, &extractors)
}

fn train_config(
    cfg: TrainConfig,
    bench: &dyn Benchmark,
    manifest: &Manifest,
    splits: &SplitSpec,
    store: &FeatureStore,
    opts: &RunOptions,
) -> Result<TrainedConfig> {
    let recs = manifest.records();
    let kinds = bench.extractors();
    let mut train_ids = Vec::new();
    for (&(_, l, m), cell) in &splits.cells {
        if cfg.cells.contains(&(l, m)) {
            train_ids.extend(cell.train.iter().copied());
        }
    }
    train_ids.sort_unstable();
    let mut labels = Vec::new();
    let mut x: Vec<Vec<Vec<f64>>> = vec![Vec::new(); kinds.len()];
    for &i in &train_ids {
        for u in store.units(i) {
            labels.push(recs[i].script());
            for (k, xs) in x.iter_mut().enumerate() {
                xs.push(u[k].clone());
            }
        }
    }
    let models = if labels.is_empty() {
        Vec::new()
    } else {
        kinds
            .iter()
            .zip(&x)
            .map(|(&k, xs)| train_ova_search(k, xs, &labels, &opts.grid(bench.kernel_family(k))))
            .collect::<Result<Vec<_>>>()?
    };
    Ok(TrainedConfig {
        config: cfg,
        models,
        training_vectors: labels.len(),
    })
}

/// Trains every configuration of `task` without testing.
pub fn train_task(
    task: Task,
    bench: &dyn Benchmark,
    manifest: &Manifest,
    splits: &SplitSpec,
    opts: &RunOptions,
) -> Result<Vec<TrainedConfig>> {
    let store = prepare(bench, manifest, splits, false)?;
    task.configs()
        .into_iter()
        .map(|cfg| train_config(cfg, bench, manifest, splits, &store, opts))
        .collect()
}

fn test_type(
    bench: &dyn Benchmark,
    manifest: &Manifest,
    splits: &SplitSpec,
    store: &FeatureStore,
    models: &[MultiModel],
    (m, l): (Modality, Level),
) -> Result<Option<TestOutcome>> {
    let recs = manifest.records();
    let ids: Vec<usize> = splits
        .cells
        .iter()
        .filter(|(&(_, cl, cm), _)| cl == l && cm == m)
        .flat_map(|(_, c)| c.test.iter().copied())
        .collect();
    if ids.is_empty() || models.is_empty() {
        return Ok(None);
    }
    let scores = ids
        .par_iter()
        .map(|&i| score_sample(bench, models, store.units(i)))
        .collect::<Result<Vec<_>>>()?;
    let truths: Vec<Script> = ids.iter().map(|&i| recs[i].script()).collect();
    let preds: Vec<Script> = scores.iter().map(ScoreVector::argmax).collect();
    let cm = confusion(&preds, &truths)?;
    Ok(Some(TestOutcome {
        modality: m,
        level: l,
        hit_ratio: hit_ratio(&cm),
        weighted_diagonal: weighted_diagonal(&cm),
        cmc: cmc(&scores, &truths)?,
        confusion: cm,
        samples: ids
            .iter()
            .zip(truths.iter().zip(&scores))
            .map(|(&record, (&truth, &scores))| SampleResult { record, truth, scores })
            .collect(),
    }))
}

/// Trains every configuration of `task` and tests it on all six test types.
pub fn run_task(
    task: Task,
    bench: &dyn Benchmark,
    manifest: &Manifest,
    splits: &SplitSpec,
    opts: &RunOptions,
) -> Result<Vec<EvalReport>> {
    let store = prepare(bench, manifest, splits, true)?;
    let mut reports = Vec::new();
    for cfg in task.configs() {
        let trained = train_config(cfg, bench, manifest, splits, &store, opts)?;
        let tests = TEST_TYPES
            .iter()
            .map(|&tt| test_type(bench, manifest, splits, &store, &trained.models, tt))
            .collect::<Result<Vec<_>>>()?;
        reports.push(EvalReport {
            task,
            benchmark: bench.name().to_string(),
            kernels: bench.extractors().into_iter().zip(&trained.models).map(|(k, m)| (k, m.kernel())).collect(),
            training_vectors: trained.training_vectors,
            train: trained.config,
            tests,
        });
    }
    Ok(reports)
}
