//! Pixel-budget training sequences and the fixed-count preset.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use crate::corpus::{Level, Manifest, Modality};
use crate::error::{Error, Result};
use crate::Script;

pub const DEFAULT_BUDGET: u64 = 2_000_000;

pub type CellKey = (Script, Level, Modality);

/// Training and test records of one (script, level, modality) cell, as
/// indices into the manifest.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CellSplit {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
    pub train_pixels: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SplitSpec {
    pub budget: u64,
    pub cells: BTreeMap<CellKey, CellSplit>,
}

impl SplitSpec {
    pub fn get(&self, script: Script, level: Level, modality: Modality) -> Option<&CellSplit> {
        self.cells.get(&(script, level, modality))
    }

    fn merge(&mut self, other: SplitSpec) {
        self.cells.extend(other.cells);
    }

    /// Every cell must have disjoint training and test paths.
    pub fn check_disjoint(&self, manifest: &Manifest) -> Result<()> {
        let recs = manifest.records();
        for (&(script, level, modality), cell) in &self.cells {
            let train: HashSet<_> = cell.train.iter().map(|&i| &recs[i].path).collect();
            if let Some(&i) = cell.test.iter().find(|&&i| train.contains(&recs[i].path)) {
                return Err(Error::SplitOverlap {
                    script,
                    level,
                    modality,
                    sample: recs[i].path.display().to_string(),
                });
            }
        }
        Ok(())
    }

    /// Writes `script,level,modality,role,sample` rows.
    pub fn write<W: std::io::Write>(&self, manifest: &Manifest, mut out: W) -> std::io::Result<()> {
        writeln!(out, "script,level,modality,role,sample")?;
        for (&(s, l, m), cell) in &self.cells {
            for (role, ids) in [("train", &cell.train), ("test", &cell.test)] {
                for &i in ids {
                    writeln!(out, "{},{},{},{},{}", s.abbrev(), l, m, role, manifest.records()[i].name)?;
                }
            }
        }
        Ok(())
    }
}

fn cell_indices(manifest: &Manifest, script: Script, level: Level, modality: Modality) -> Vec<usize> {
    manifest
        .records()
        .iter()
        .enumerate()
        .filter(|(_, r)| r.script() == script && r.level() == level && r.modality == modality)
        .map(|(i, _)| i)
        .collect()
}

fn split_prefix(manifest: &Manifest, ids: Vec<usize>, take: usize) -> CellSplit {
    let take = take.min(ids.len());
    let train_pixels = ids[..take].iter().map(|&i| manifest.records()[i].fg_pixels).sum();
    let mut train = ids;
    let test = train.split_off(take);
    CellSplit {
        train,
        test,
        train_pixels,
    }
}

/// Number of leading samples whose cumulative count first reaches `budget`,
/// or all of them.
pub fn budget_prefix(pixels: &[u64], budget: u64) -> usize {
    let mut total = 0u64;
    for (i, &p) in pixels.iter().enumerate() {
        total += p;
        if total >= budget {
            return i + 1;
        }
    }
    pixels.len()
}

/// Per script present in the manifest, trains on the numerically first
/// samples until their foreground pixels reach `budget`.
pub fn select_training(manifest: &Manifest, level: Level, modality: Modality, budget: u64) -> Result<SplitSpec> {
    if budget == 0 {
        return Err(Error::InvalidParameter("pixel budget must be positive".into()));
    }
    let mut spec = SplitSpec {
        budget,
        cells: BTreeMap::new(),
    };
    let mut missing = Vec::new();
    for script in manifest.scripts() {
        let ids = cell_indices(manifest, script, level, modality);
        if ids.is_empty() {
            missing.push((script, level, modality));
            continue;
        }
        let pixels: Vec<u64> = ids.iter().map(|&i| manifest.records()[i].fg_pixels).collect();
        let take = budget_prefix(&pixels, budget);
        spec.cells.insert((script, level, modality), split_prefix(manifest, ids, take));
    }
    if manifest.scripts().is_empty() {
        return Err(Error::InvalidParameter("manifest is empty".into()));
    }
    if !missing.is_empty() {
        return Err(Error::MissingCells(missing));
    }
    Ok(spec)
}

/// Splits every level of every modality present in the manifest.
pub fn select_all(manifest: &Manifest, budget: u64, preset: Option<Preset>) -> Result<SplitSpec> {
    if let Some(p) = preset {
        return p.apply(manifest);
    }
    let mut spec = SplitSpec {
        budget,
        cells: BTreeMap::new(),
    };
    let mut missing = Vec::new();
    for modality in manifest.modalities() {
        for level in Level::ALL {
            match select_training(manifest, level, modality, budget) {
                Ok(s) => spec.merge(s),
                Err(Error::MissingCells(m)) => missing.extend(m),
                Err(e) => return Err(e),
            }
        }
    }
    if manifest.is_empty() {
        return Err(Error::InvalidParameter("manifest is empty".into()));
    }
    if !missing.is_empty() {
        missing.sort();
        return Err(Error::MissingCells(missing));
    }
    Ok(spec)
}

/// Handwritten docs, lines, words, then printed docs, lines, words.
const TABLE4: [[usize; 6]; 13] = [
    [5, 88, 570, 14, 256, 1996],
    [3, 55, 401, 27, 234, 1608],
    [2, 32, 144, 22, 190, 1229],
    [4, 88, 560, 39, 468, 3629],
    [15, 184, 1165, 33, 215, 1706],
    [4, 96, 352, 64, 447, 1451],
    [3, 122, 872, 38, 302, 1183],
    [9, 168, 575, 26, 314, 2370],
    [3, 49, 333, 25, 348, 1660],
    [9, 83, 558, 14, 244, 1574],
    [3, 150, 873, 36, 240, 451],
    [3, 123, 640, 32, 264, 1261],
    [4, 158, 1828, 27, 194, 1856],
];

/// Fixed training counts that replace the pixel budget.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preset {
    Mdiw13Table4,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Mdiw13Table4 => "mdiw13-table4",
        }
    }

    pub fn count(self, script: Script, level: Level, modality: Modality) -> usize {
        let col = match modality {
            Modality::Handwritten => 0,
            Modality::Printed => 3,
        } + match level {
            Level::Doc => 0,
            Level::Line => 1,
            Level::Word => 2,
        };
        TABLE4[script.index()][col]
    }

    /// Requires every script, level and modality, each with more samples
    /// than its training count.
    pub fn apply(self, manifest: &Manifest) -> Result<SplitSpec> {
        let mut spec = SplitSpec::default();
        for script in Script::ALL {
            for modality in Modality::ALL {
                for level in Level::ALL {
                    let ids = cell_indices(manifest, script, level, modality);
                    let n = self.count(script, level, modality);
                    if ids.len() <= n {
                        return Err(Error::PresetMismatch {
                            preset: self.name().into(),
                            reason: format!(
                                "{} {modality} {level}: {} samples, preset trains on {n}",
                                script.abbrev(),
                                ids.len()
                            ),
                        });
                    }
                    spec.cells.insert((script, level, modality), split_prefix(manifest, ids, n));
                }
            }
        }
        Ok(spec)
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mdiw13-table4" => Ok(Preset::Mdiw13Table4),
            other => Err(Error::InvalidParameter(format!("unknown preset {other:?}"))),
        }
    }
}
