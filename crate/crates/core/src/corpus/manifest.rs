//! Corpus manifests: one record per sample image with its cached
//! foreground-pixel count.

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use walkdir::WalkDir;

use super::naming::{parse_name, SampleName};
use super::{Level, Modality};
use crate::error::{Error, Result};
use crate::imagecore::io::read_png;
use crate::imagecore::{binarize, DEFAULT_SENSITIVITY, DEFAULT_WINDOW};
use crate::Script;

pub const MANIFEST_HEADER: &str = "path,script,level,modality,doc,line,word,fg_pixels";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManifestRecord {
    pub path: PathBuf,
    pub name: SampleName,
    pub modality: Modality,
    pub fg_pixels: u64,
}

impl ManifestRecord {
    pub fn script(&self) -> Script {
        self.name.script
    }

    pub fn level(&self) -> Level {
        self.name.level()
    }

    fn sort_key(&self) -> (Script, Modality, u32, Option<u32>, Option<u32>, &Path) {
        let n = &self.name;
        (n.script, self.modality, n.doc, n.line, n.word, &self.path)
    }
}

/// Per-(script, modality) sample counts in the layout of the dataset
/// figures table.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CellCounts {
    pub docs: usize,
    pub lines: usize,
    pub words: usize,
    pub fg_pixels: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Manifest {
    records: Vec<ManifestRecord>,
}

impl Manifest {
    /// Sorts by (script, modality, doc, line, word); rejects duplicate paths.
    pub fn new(mut records: Vec<ManifestRecord>) -> Result<Self> {
        records.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
        for w in records.windows(2) {
            if w[0].path == w[1].path {
                return Err(Error::Format {
                    what: "manifest",
                    detail: format!("duplicate path {}", w[0].path.display()),
                });
            }
        }
        Ok(Self { records })
    }

    pub fn records(&self) -> &[ManifestRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Records of one cell in numeric file order.
    pub fn cell(&self, script: Script, level: Level, modality: Modality) -> impl Iterator<Item = &ManifestRecord> {
        self.records
            .iter()
            .filter(move |r| r.script() == script && r.level() == level && r.modality == modality)
    }

    /// Line records belonging to a document, in line order.
    pub fn lines_of(&self, script: Script, modality: Modality, doc: u32) -> Vec<&ManifestRecord> {
        self.records
            .iter()
            .filter(|r| {
                r.script() == script && r.modality == modality && r.name.doc == doc && r.level() == Level::Line
            })
            .collect()
    }

    pub fn modalities(&self) -> Vec<Modality> {
        Modality::ALL
            .into_iter()
            .filter(|m| self.records.iter().any(|r| r.modality == *m))
            .collect()
    }

    pub fn scripts(&self) -> Vec<Script> {
        Script::ALL
            .into_iter()
            .filter(|s| self.records.iter().any(|r| r.script() == *s))
            .collect()
    }

    pub fn summary(&self) -> BTreeMap<(Script, Modality), CellCounts> {
        let mut out: BTreeMap<(Script, Modality), CellCounts> = BTreeMap::new();
        for r in &self.records {
            let c = out.entry((r.script(), r.modality)).or_default();
            match r.level() {
                Level::Doc => c.docs += 1,
                Level::Line => c.lines += 1,
                Level::Word => c.words += 1,
            }
            c.fg_pixels += r.fg_pixels;
        }
        out
    }

    /// Summary as CSV: `script,modality,docs,lines,words,fg_pixels`.
    pub fn write_summary<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "script,modality,docs,lines,words,fg_pixels")?;
        for ((s, m), c) in self.summary() {
            writeln!(out, "{},{},{},{},{},{}", s.abbrev(), m, c.docs, c.lines, c.words, c.fg_pixels)?;
        }
        Ok(())
    }

    /// Writes CSV; paths under the manifest's directory are stored relative
    /// to it.
    pub fn write<W: Write>(&self, mut out: W, base: &Path) -> std::io::Result<()> {
        writeln!(out, "{MANIFEST_HEADER}")?;
        for r in &self.records {
            let p = r.path.strip_prefix(base).unwrap_or(&r.path);
            let p = p.to_string_lossy().replace('\\', "/");
            let opt = |v: Option<u32>| v.map(|v| v.to_string()).unwrap_or_default();
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                p,
                r.script().abbrev(),
                r.level(),
                r.modality,
                r.name.doc,
                opt(r.name.line),
                opt(r.name.word),
                r.fg_pixels
            )?;
        }
        out.flush()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let base = path.parent().unwrap_or(Path::new(""));
        let f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write(std::io::BufWriter::new(f), base).map_err(|e| Error::io(path, e))
    }

    /// Parses CSV; relative paths are resolved against `base`.
    pub fn read<R: BufRead>(input: R, base: &Path) -> Result<Self> {
        let err = |detail: String| Error::Format {
            what: "manifest",
            detail,
        };
        let mut lines = input.lines();
        match lines.next() {
            Some(Ok(h)) if h.trim_end() == MANIFEST_HEADER => {}
            _ => return Err(err("missing header".into())),
        }
        let mut records = Vec::new();
        for (n, line) in lines.enumerate() {
            let line = line.map_err(|e| err(e.to_string()))?;
            if line.is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 8 {
                return Err(err(format!("line {}: expected 8 fields", n + 2)));
            }
            let path = base.join(f[0]);
            let name = parse_name(f[0])?;
            let num = |s: &str| -> Result<Option<u32>> {
                if s.is_empty() {
                    Ok(None)
                } else {
                    s.parse().map(Some).map_err(|_| err(format!("line {}: bad index {s:?}", n + 2)))
                }
            };
            let script: Script = f[1].parse()?;
            let level: Level = f[2].parse()?;
            let doc = num(f[4])?;
            if script != name.script
                || level != name.level()
                || doc != Some(name.doc)
                || num(f[5])? != name.line
                || num(f[6])? != name.word
            {
                return Err(err(format!("line {}: fields disagree with file name", n + 2)));
            }
            records.push(ManifestRecord {
                path,
                name,
                modality: f[3].parse()?,
                fg_pixels: f[7].parse().map_err(|_| err(format!("line {}: bad pixel count", n + 2)))?,
            });
        }
        Self::new(records)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read(BufReader::new(f), path.parent().unwrap_or(Path::new("")))
    }
}

/// Result of scanning a corpus tree.
#[derive(Debug, Default)]
pub struct ManifestScan {
    pub manifest: Manifest,
    /// Files that could not be used, with the reason.
    pub skipped: Vec<(PathBuf, String)>,
}

fn modality_of(root: &Path, path: &Path) -> Option<Modality> {
    let top = path.strip_prefix(root).ok()?.components().next()?;
    top.as_os_str().to_str()?.parse().ok()
}

/// Foreground pixels of an image under the default binarizer.
pub fn count_foreground(path: &Path) -> Result<u64> {
    let img = read_png(path, None)?;
    Ok(binarize(&img, DEFAULT_WINDOW, DEFAULT_SENSITIVITY)?.foreground_count() as u64)
}

/// Recursively scans `root` for `.png` samples. Modality comes from the top
/// directory (`handwritten/`, `printed/`) unless `modality` overrides it.
pub fn build_manifest(root: &Path, modality: Option<Modality>) -> Result<ManifestScan> {
    let mut skipped = Vec::new();
    let mut candidates = Vec::new();
    for entry in WalkDir::new(root).sort_by_file_name() {
        let entry = match entry {
            Ok(e) => e,
            Err(e) => {
                let p = e.path().map(Path::to_path_buf).unwrap_or_else(|| root.to_path_buf());
                skipped.push((p, e.to_string()));
                continue;
            }
        };
        let path = entry.path();
        let is_png = path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| e.eq_ignore_ascii_case("png"));
        if !entry.file_type().is_file() || !is_png {
            continue;
        }
        let name = match parse_name(&entry.file_name().to_string_lossy()) {
            Ok(n) => n,
            Err(e) => {
                skipped.push((path.to_path_buf(), e.to_string()));
                continue;
            }
        };
        match modality.or_else(|| modality_of(root, path)) {
            Some(m) => candidates.push((path.to_path_buf(), name, m)),
            None => skipped.push((path.to_path_buf(), "no handwritten/ or printed/ top directory".into())),
        }
    }
    let counted: Vec<_> = candidates
        .into_par_iter()
        .map(|(path, name, modality)| {
            let n = count_foreground(&path);
            (path, name, modality, n)
        })
        .collect();
    let mut records = Vec::with_capacity(counted.len());
    for (path, name, modality, n) in counted {
        match n {
            Ok(fg_pixels) => records.push(ManifestRecord {
                path,
                name,
                modality,
                fg_pixels,
            }),
            Err(e) => skipped.push((path, e.to_string())),
        }
    }
    Ok(ManifestScan {
        manifest: Manifest::new(records)?,
        skipped,
    })
}
