//! Synthetic stroke-texture corpus in the standard directory layout.
//!
//! Class `c` of `k` draws strokes oriented at `c·180°/k` with its own
//! curvature and stroke width. Lines are sequences of words separated by
//! gaps wider than a third of the line height; documents stack lines.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::manifest::{build_manifest, Manifest};
use super::naming::SampleName;
use super::Modality;
use crate::error::{Error, Result};
use crate::imagecore::io::write_png;
use crate::imagecore::{RasterImage, DEFAULT_DPI};
use crate::{Script, SCRIPT_COUNT};

pub const LINE_HEIGHT: usize = 96;
/// Approximate ink pixels per word.
pub const WORD_INK: usize = 16_000;
const MAX_WORD_WIDTH: f64 = 2000.0;
const MARGIN: usize = 12;
const STROKES_PER_GLYPH: usize = 4;
const GLYPH_ADVANCE: f64 = 12.0;
const STROKE_LENGTH: f64 = 34.0;
const WORD_PAD: usize = 4;

#[derive(Clone, Debug, PartialEq)]
pub struct SynthSpec {
    pub classes: usize,
    pub docs: usize,
    pub lines: usize,
    pub words: usize,
    pub seed: u64,
    pub modalities: Vec<Modality>,
}

impl SynthSpec {
    /// Printed-only corpus.
    pub fn new(classes: usize, docs: usize, lines: usize, words: usize, seed: u64) -> Self {
        Self {
            classes,
            docs,
            lines,
            words,
            seed,
            modalities: vec![Modality::Printed],
        }
    }

    pub fn with_modalities(mut self, modalities: &[Modality]) -> Self {
        self.modalities = modalities.to_vec();
        self
    }

    fn validate(&self) -> Result<()> {
        if self.classes < 1 || self.classes > SCRIPT_COUNT {
            return Err(Error::InvalidParameter(format!("classes must be 1..=13, got {}", self.classes)));
        }
        if self.docs == 0 || self.lines == 0 || self.words == 0 {
            return Err(Error::InvalidParameter("docs, lines and words must be at least 1".into()));
        }
        if self.docs > 999 || self.lines > 999 || self.words > 999 {
            return Err(Error::InvalidParameter("indices are limited to three digits".into()));
        }
        if self.modalities.is_empty() {
            return Err(Error::InvalidParameter("no modality requested".into()));
        }
        Ok(())
    }
}

/// Stroke style of one class.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassStyle {
    /// Radians, 0 = horizontal.
    pub angle: f64,
    /// Control-point offset as a fraction of stroke length.
    pub bend: f64,
    pub width: f64,
}

pub fn class_style(class: usize, classes: usize) -> ClassStyle {
    ClassStyle {
        angle: class as f64 * std::f64::consts::PI / classes as f64,
        bend: [0.0, 0.18, -0.12, 0.3, -0.25][class % 5],
        width: 3.0 + (class % 4) as f64,
    }
}

/// Coverage canvas with max blending; `inked` counts pixels at half
/// coverage or more.
struct Canvas {
    w: usize,
    h: usize,
    cov: Vec<f32>,
    inked: usize,
}

impl Canvas {
    fn new(w: usize, h: usize) -> Self {
        Self {
            w,
            h,
            cov: vec![0.0; w * h],
            inked: 0,
        }
    }

    fn segment(&mut self, a: (f64, f64), b: (f64, f64), width: f64) {
        let r = width / 2.0 + 0.5;
        let x0 = (a.0.min(b.0) - r).floor().max(0.0) as usize;
        let y0 = (a.1.min(b.1) - r).floor().max(0.0) as usize;
        let x1 = ((a.0.max(b.0) + r).ceil() as usize + 1).min(self.w);
        let y1 = ((a.1.max(b.1) + r).ceil() as usize + 1).min(self.h);
        let (dx, dy) = (b.0 - a.0, b.1 - a.1);
        let len2 = dx * dx + dy * dy;
        for y in y0..y1 {
            for x in x0..x1 {
                let (px, py) = (x as f64 + 0.5 - a.0, y as f64 + 0.5 - a.1);
                let t = if len2 > 0.0 { ((px * dx + py * dy) / len2).clamp(0.0, 1.0) } else { 0.0 };
                let (ex, ey) = (px - t * dx, py - t * dy);
                let c = (r - (ex * ex + ey * ey).sqrt()).clamp(0.0, 1.0) as f32;
                let slot = &mut self.cov[y * self.w + x];
                if c > *slot {
                    if *slot < 0.5 && c >= 0.5 {
                        self.inked += 1;
                    }
                    *slot = c;
                }
            }
        }
    }

    fn bezier(&mut self, p0: (f64, f64), p1: (f64, f64), p2: (f64, f64), width: f64) {
        const STEPS: usize = 6;
        let at = |t: f64| {
            let u = 1.0 - t;
            (
                u * u * p0.0 + 2.0 * u * t * p1.0 + t * t * p2.0,
                u * u * p0.1 + 2.0 * u * t * p1.1 + t * t * p2.1,
            )
        };
        let mut prev = p0;
        for i in 1..=STEPS {
            let next = at(i as f64 / STEPS as f64);
            self.segment(prev, next, width);
            prev = next;
        }
    }

    fn render(&self, ink: u8) -> RasterImage {
        let span = 255.0 - ink as f32;
        RasterImage::from_fn(self.w, self.h, |x, y| (255.0 - self.cov[y * self.w + x] * span).round() as u8)
            .expect("nonempty canvas")
            .with_dpi(DEFAULT_DPI)
            .expect("positive dpi")
    }
}

struct Stroke {
    p0: (f64, f64),
    p1: (f64, f64),
    p2: (f64, f64),
    width: f64,
}

impl Stroke {
    fn x_extent(&self) -> (f64, f64) {
        let r = self.width / 2.0 + 1.0;
        let xs = [self.p0.0, self.p1.0, self.p2.0];
        (
            xs.iter().copied().fold(f64::INFINITY, f64::min) - r,
            xs.iter().copied().fold(f64::NEG_INFINITY, f64::max) + r,
        )
    }
}

/// A rendered line plus the column span of each word.
pub struct SynthLine {
    pub image: RasterImage,
    pub words: Vec<(usize, usize)>,
}

fn glyph_strokes(rng: &mut ChaCha8Rng, style: ClassStyle, cx: f64, cy: f64, handwritten: bool) -> Vec<Stroke> {
    let (jitter, drift, wvar) = if handwritten { (0.2, 14.0, 1.0) } else { (0.05, 12.0, 0.0) };
    let angle = style.angle + rng.gen_range(-jitter..=jitter);
    let (d, n) = ((angle.cos(), angle.sin()), (-angle.sin(), angle.cos()));
    let cy = cy + rng.gen_range(-drift..=drift);
    let width = style.width + if wvar > 0.0 { rng.gen_range(-wvar..=wvar) } else { 0.0 };
    let spacing = width + 2.0;
    let mut out = Vec::with_capacity(STROKES_PER_GLYPH);
    for s in 0..STROKES_PER_GLYPH {
        let off = (s as f64 - (STROKES_PER_GLYPH - 1) as f64 / 2.0) * spacing;
        let len = STROKE_LENGTH * rng.gen_range(0.8..1.0);
        let c = (cx + n.0 * off, cy + n.1 * off);
        let half = len / 2.0;
        let bend = style.bend * len;
        out.push(Stroke {
            p0: (c.0 - d.0 * half, c.1 - d.1 * half),
            p1: (c.0 + n.0 * bend, c.1 + n.1 * bend),
            p2: (c.0 + d.0 * half, c.1 + d.1 * half),
            width,
        });
    }
    out
}

/// Renders one line of `words` words, each grown glyph by glyph until it
/// holds about `WORD_INK` ink pixels.
pub fn render_line(rng: &mut ChaCha8Rng, style: ClassStyle, words: usize, handwritten: bool) -> SynthLine {
    let h = LINE_HEIGHT;
    let cy = h as f64 / 2.0;
    let min_gap = h / 3 + 1;
    let reach = STROKE_LENGTH / 2.0 + 0.3 * STROKE_LENGTH + style.width + 2.0;
    let capacity = 2 * MARGIN + words * (MAX_WORD_WIDTH as usize + 2 * reach as usize + h / 3 + h / 4);
    let mut canvas = Canvas::new(capacity, h);
    let mut spans = Vec::with_capacity(words);
    let mut cursor = MARGIN as f64;
    for _ in 0..words {
        let target = canvas.inked + (WORD_INK as f64 * rng.gen_range(0.85..1.15)) as usize;
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        let mut cx = cursor + reach;
        while canvas.inked < target && cx - cursor < MAX_WORD_WIDTH {
            for s in glyph_strokes(rng, style, cx, cy, handwritten) {
                let (a, b) = s.x_extent();
                lo = lo.min(a);
                hi = hi.max(b);
                canvas.bezier(s.p0, s.p1, s.p2, s.width);
            }
            cx += GLYPH_ADVANCE;
        }
        let (x0, x1) = (lo.floor().max(0.0) as usize, hi.ceil() as usize);
        spans.push((x0, x1));
        cursor = x1 as f64 + (min_gap + rng.gen_range(2..h / 4)) as f64;
    }
    let width = spans.last().map_or(MARGIN, |s| s.1) + MARGIN;
    let ink = rng.gen_range(20..=60);
    let full = canvas.render(ink);
    SynthLine {
        image: full
            .crop(crate::imagecore::Rect::new(0, 0, width, h))
            .expect("line inside canvas"),
        words: spans,
    }
}

fn stream_id(modality: Modality, class: usize, doc: usize, line: usize) -> u64 {
    (((modality as u64) * 16 + class as u64) * 1024 + doc as u64) * 1024 + line as u64
}

fn stack_lines(lines: &[RasterImage]) -> RasterImage {
    let gap = LINE_HEIGHT / 2;
    let w = lines.iter().map(RasterImage::width).max().unwrap_or(1) + 2 * MARGIN;
    let h = lines.iter().map(|l| l.height() + gap).sum::<usize>() - gap + 2 * MARGIN;
    let mut page = RasterImage::filled(w, h, 255)
        .expect("nonempty page")
        .with_dpi(DEFAULT_DPI)
        .expect("positive dpi");
    let mut y0 = MARGIN;
    for l in lines {
        for y in 0..l.height() {
            for x in 0..l.width() {
                page.set(MARGIN + x, y0 + y, l.get(x, y));
            }
        }
        y0 += l.height() + gap;
    }
    page
}

/// Renders all files of one document and returns `(relative name, image)`.
fn render_doc(spec: &SynthSpec, modality: Modality, class: usize, doc: usize) -> Vec<(SampleName, RasterImage)> {
    let script = Script::ALL[class];
    let style = class_style(class, spec.classes);
    let handwritten = modality == Modality::Handwritten;
    let mut out = Vec::new();
    let mut lines = Vec::with_capacity(spec.lines);
    for l in 1..=spec.lines {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        rng.set_stream(stream_id(modality, class, doc, l));
        let line = render_line(&mut rng, style, spec.words, handwritten);
        for (w, &(x0, x1)) in line.words.iter().enumerate() {
            let x0 = x0.saturating_sub(WORD_PAD);
            let x1 = (x1 + WORD_PAD).min(line.image.width());
            let crop = line
                .image
                .crop(crate::imagecore::Rect::new(x0, 0, x1, line.image.height()))
                .expect("word inside line");
            out.push((SampleName::word(script, doc as u32, l as u32, w as u32 + 1), crop));
        }
        out.push((SampleName::line(script, doc as u32, l as u32), line.image.clone()));
        lines.push(line.image);
    }
    out.push((SampleName::doc(script, doc as u32), stack_lines(&lines)));
    out
}

/// Writes the corpus under `root` as `<modality>/<Abbrev>/<name>.png`, then
/// scans it and saves `root/manifest.csv`.
pub fn synth_corpus(spec: &SynthSpec, root: &Path) -> Result<Manifest> {
    spec.validate()?;
    let mut jobs = Vec::new();
    for &m in &spec.modalities {
        for c in 0..spec.classes {
            let dir = root.join(m.as_str()).join(Script::ALL[c].abbrev());
            std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
            for d in 1..=spec.docs {
                jobs.push((m, c, d, dir.clone()));
            }
        }
    }
    jobs.par_iter().try_for_each(|(m, c, d, dir)| {
        for (name, img) in render_doc(spec, *m, *c, *d) {
            write_png(&dir.join(name.file_name()), &img)?;
        }
        Ok::<(), Error>(())
    })?;
    let scan = build_manifest(root, None)?;
    if let Some((p, why)) = scan.skipped.first() {
        return Err(Error::Format {
            what: "synthetic corpus",
            detail: format!("{}: {why}", p.display()),
        });
    }
    scan.manifest.save(&root.join("manifest.csv"))?;
    Ok(scan.manifest)
}
