use std::fmt::Display;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use scriptid::bench::{self, BenchmarkRegistry, RunOptions, SplitSpec};
use scriptid::classify::save_multi_model;
use scriptid::corpus::{build_manifest, parse_name, synth_corpus, Level, Manifest, SampleName, SynthSpec};
use scriptid::features::format::{write_features, write_labels, LabelRecord};
use scriptid::features::{ExtractorRegistry, FeatureVector};
use scriptid::imagecore::io::{read_png, write_png};
use scriptid::imagecore::{binarize, equalize_ink, DEFAULT_SENSITIVITY, DEFAULT_WINDOW};
use scriptid::segmentation::{pseudo_segment, segment_lines, segment_words};
use scriptid::Error;

use crate::{EvaluateArgs, ExtractArgs, Failure, ManifestArgs, PreprocessArgs, PseudoWords, SegmentArgs, SynthArgs, TaskArgs};

type CmdResult = Result<usize, Failure>;

/// Ordered `key=value` record of the options behind an output directory.
struct RunConfig {
    entries: Vec<(&'static str, String)>,
}

impl RunConfig {
    fn new(command: &str) -> Self {
        Self {
            entries: vec![("command", command.to_string())],
        }
    }

    fn set(mut self, key: &'static str, value: impl Display) -> Self {
        self.entries.push((key, value.to_string()));
        self
    }

    fn set_opt<T: Display>(self, key: &'static str, value: Option<T>) -> Self {
        match value {
            Some(v) => self.set(key, v),
            None => self,
        }
    }

    fn write(&self, dir: &Path) -> Result<(), Error> {
        let mut s = String::new();
        for (k, v) in &self.entries {
            s.push_str(&format!("{k}={v}\n"));
        }
        let p = dir.join("run_config.txt");
        std::fs::write(&p, s).map_err(|e| Error::io(&p, e))
    }
}

fn join<T: Display>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

fn mkdir(p: &Path) -> Result<(), Error> {
    std::fs::create_dir_all(p).map_err(|e| Error::io(p, e))
}

fn pngs_under(root: &Path) -> Result<Vec<PathBuf>, Error> {
    let mut out = Vec::new();
    for entry in walkdir::WalkDir::new(root).sort_by_file_name() {
        let entry = entry.map_err(|e| Error::io(root, e.into()))?;
        let is_png = entry
            .path()
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| e.eq_ignore_ascii_case("png"));
        if entry.file_type().is_file() && is_png {
            out.push(entry.into_path());
        }
    }
    Ok(out)
}

pub fn preprocess(a: &PreprocessArgs) -> CmdResult {
    if !(a.sensitivity > 0.0 && a.sensitivity < 1.0) || a.window < 3 {
        return Err(Failure::Usage("need window >= 3 and sensitivity in (0, 1)".into()));
    }
    let files = pngs_under(&a.input)?;
    mkdir(&a.output)?;
    files.par_iter().try_for_each(|p| {
        let rel = p.strip_prefix(&a.input).expect("walk stays under its root");
        let out = a.output.join(rel);
        if let Some(d) = out.parent() {
            mkdir(d)?;
        }
        let fg = binarize(&read_png(p, None)?, a.window, a.sensitivity)?;
        let img = if a.binary { fg.to_raster() } else { equalize_ink(&fg)? };
        write_png(&out, &img)
    })?;
    RunConfig::new("preprocess")
        .set("input", a.input.display())
        .set("output", a.output.display())
        .set("window", a.window)
        .set("sensitivity", a.sensitivity)
        .set("binary", a.binary)
        .write(&a.output)?;
    Ok(files.len())
}

fn segment_page(a: &SegmentArgs, path: &Path, name: SampleName) -> Result<usize, Error> {
    let rel = path.strip_prefix(&a.input).expect("walk stays under its root");
    let dir = a.output.join(rel.parent().unwrap_or(Path::new("")));
    mkdir(&dir)?;
    let page = read_png(path, None)?;
    let bin = binarize(&page, DEFAULT_WINDOW, DEFAULT_SENSITIVITY)?;
    let pseudo = match a.pseudo_words {
        PseudoWords::Auto => name.script.pseudo_words(),
        PseudoWords::Always => true,
        PseudoWords::Never => false,
    };
    let mut written = 0;
    for line in segment_lines(&bin) {
        let l = line.index[0];
        let line_name = SampleName::line(name.script, name.doc, l);
        write_png(&dir.join(line_name.file_name()), &line.render_gray(&page))?;
        written += 1;
        if a.no_words {
            continue;
        }
        let words = if pseudo { pseudo_segment(&line) } else { segment_words(&line) };
        for w in words {
            let word_name = SampleName::word(name.script, name.doc, l, w.index[1]);
            write_png(&dir.join(word_name.file_name()), &w.render_gray(&page))?;
            written += 1;
        }
    }
    Ok(written)
}

pub fn segment(a: &SegmentArgs) -> CmdResult {
    let mut pages = Vec::new();
    for p in pngs_under(&a.input)? {
        let file = p.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default();
        match parse_name(&file) {
            Ok(n) if n.level() == Level::Doc => pages.push((p, n)),
            Ok(_) => {}
            Err(e) => eprintln!("skipping {}: {e}", p.display()),
        }
    }
    if pages.is_empty() {
        return Err(Failure::Data(Error::InvalidParameter(format!(
            "no document pages under {}",
            a.input.display()
        ))));
    }
    mkdir(&a.output)?;
    let counts = pages
        .par_iter()
        .map(|(p, n)| segment_page(a, p, *n))
        .collect::<Result<Vec<_>, Error>>()?;
    RunConfig::new("segment")
        .set("input", a.input.display())
        .set("output", a.output.display())
        .set("pseudo-words", format!("{:?}", a.pseudo_words).to_lowercase())
        .set("no-words", a.no_words)
        .write(&a.output)?;
    Ok(counts.iter().sum())
}

pub fn manifest(a: &ManifestArgs) -> CmdResult {
    let scan = build_manifest(&a.root, a.modality)?;
    for (p, why) in &scan.skipped {
        eprintln!("skipped {}: {why}", p.display());
    }
    let out = a.output.clone().unwrap_or_else(|| a.root.join("manifest.csv"));
    scan.manifest.save(&out)?;
    if let Some(s) = &a.summary {
        let mut buf = Vec::new();
        scan.manifest.write_summary(&mut buf).map_err(|e| Error::io(s, e))?;
        std::fs::write(s, buf).map_err(|e| Error::io(s, e))?;
    }
    Ok(scan.manifest.len())
}

pub fn extract(a: &ExtractArgs) -> CmdResult {
    let extractor = ExtractorRegistry::standard()
        .get(&a.extractor)
        .map_err(|e| Failure::Usage(e.to_string()))?;
    let m = Manifest::load(&a.manifest)?;
    let recs: Vec<_> = m
        .records()
        .iter()
        .filter(|r| a.level.is_none_or(|l| r.level() == l) && a.modality.is_none_or(|x| r.modality == x))
        .collect();
    let kind = extractor.kind();
    let vectors = recs
        .par_iter()
        .map(|r| {
            let img = read_png(&r.path, None)?;
            let mut v = bench::sample_features(&img, std::slice::from_ref(&extractor))?;
            FeatureVector::new(kind, v.remove(0))
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let labels: Vec<LabelRecord> = recs
        .iter()
        .map(|r| LabelRecord {
            sample_id: r.name.to_string(),
            script: r.script(),
            level: r.level(),
            modality: r.modality,
        })
        .collect();
    let mut buf = Vec::new();
    write_features(&mut buf, kind, &vectors).map_err(|e| Error::io(&a.output, e))?;
    std::fs::write(&a.output, buf).map_err(|e| Error::io(&a.output, e))?;
    let lp = a.labels.clone().unwrap_or_else(|| {
        let mut s = a.output.clone().into_os_string();
        s.push(".labels.csv");
        PathBuf::from(s)
    });
    let mut buf = Vec::new();
    write_labels(&mut buf, &labels).map_err(|e| Error::io(&lp, e))?;
    std::fs::write(&lp, buf).map_err(|e| Error::io(&lp, e))?;
    Ok(vectors.len())
}

struct Prepared {
    manifest: Manifest,
    bench: std::sync::Arc<dyn bench::Benchmark>,
    splits: SplitSpec,
    opts: RunOptions,
}

fn prepare_task(a: &TaskArgs) -> Result<Prepared, Failure> {
    let bench = BenchmarkRegistry::standard()
        .get(&a.benchmark)
        .map_err(|e| Failure::Usage(e.to_string()))?;
    if a.gammas.as_ref().is_some_and(|g| g.is_empty()) || a.regs.as_ref().is_some_and(|r| r.is_empty()) {
        return Err(Failure::Usage("empty kernel grid".into()));
    }
    let manifest = Manifest::load(&a.manifest)?;
    let splits = bench::select_all(&manifest, a.budget, a.preset)?;
    mkdir(&a.output)?;
    let mut buf = Vec::new();
    splits.write(&manifest, &mut buf).map_err(|e| Error::io(&a.output, e))?;
    let p = a.output.join("splits.csv");
    std::fs::write(&p, buf).map_err(|e| Error::io(&p, e))?;
    Ok(Prepared {
        manifest,
        bench,
        splits,
        opts: RunOptions {
            gammas: a.gammas.clone(),
            regs: a.regs.clone(),
        },
    })
}

fn task_config(command: &str, a: &TaskArgs) -> RunConfig {
    RunConfig::new(command)
        .set("manifest", a.manifest.display())
        .set("task", a.task)
        .set("benchmark", &a.benchmark)
        .set("output", a.output.display())
        .set("budget", a.budget)
        .set_opt("preset", a.preset)
        .set_opt("gammas", a.gammas.as_deref().map(join))
        .set_opt("regs", a.regs.as_deref().map(join))
}

pub fn train(a: &TaskArgs) -> CmdResult {
    let p = prepare_task(a)?;
    let trained = bench::train_task(a.task, p.bench.as_ref(), &p.manifest, &p.splits, &p.opts)?;
    let mut n = 0;
    for t in &trained {
        for m in &t.models {
            let dir = a.output.join("models").join(&t.config.label).join(m.kind().name());
            save_multi_model(m, &dir)?;
        }
        n += usize::from(!t.models.is_empty());
    }
    task_config("train", a).write(&a.output)?;
    Ok(n)
}

pub fn evaluate(a: &EvaluateArgs) -> CmdResult {
    let t = &a.task;
    let p = prepare_task(t)?;
    let reports = bench::run_task(t.task, p.bench.as_ref(), &p.manifest, &p.splits, &p.opts)?;
    let cells = bench::write_reports(&t.output, &p.manifest, &reports, a.svg)?;
    task_config("evaluate", t).set("svg", a.svg).write(&t.output)?;
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(bench::report::task_table(&reports).as_bytes());
    Ok(cells)
}

pub fn synth(a: &SynthArgs) -> CmdResult {
    let spec = SynthSpec::new(a.classes, a.docs, a.lines, a.words, a.seed).with_modalities(&a.modalities);
    let m = synth_corpus(&spec, &a.output)?;
    RunConfig::new("synth")
        .set("output", a.output.display())
        .set("classes", a.classes)
        .set("docs", a.docs)
        .set("lines", a.lines)
        .set("words", a.words)
        .set("seed", a.seed)
        .set("modalities", join(&a.modalities))
        .write(&a.output)?;
    Ok(m.len())
}
