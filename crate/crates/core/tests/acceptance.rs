//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use scriptid::bench::{
    cmc, confusion, hit_ratio, run_task, select_all, select_training, write_reports, BenchmarkRegistry,
    EvalReport, Preset, RunOptions, Task, DEFAULT_BUDGET,
};
use scriptid::classify::{kernel, train_lssvm, KernelConfig, ScoreVector};
use scriptid::corpus::{synth_corpus, Level, Manifest, ManifestRecord, Modality, SampleName, SynthSpec};
use scriptid::features::{
    dense_mblbp_feature, hot_counts, lbp_feature, lbp_map, quadtree_hot, sobel_magnitude_sq, TemplateSet,
};
use scriptid::imagecore::{binarize, BinaryImage, RasterImage, Rect};
use scriptid::segmentation::{pseudo_segment, pseudo_word_sizes, segment_lines, split_words, Region};
use scriptid::{Script, SCRIPT_COUNT};

type Check = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn random_image(rng: &mut ChaCha8Rng, w: usize, h: usize, levels: u8) -> RasterImage {
    RasterImage::from_fn(w, h, |_, _| rng.gen_range(0..levels)).unwrap()
}

fn within(t: Instant, limit: Duration, what: &str) -> Check {
    let e = t.elapsed();
    ensure!(e < limit, "{what} took {e:?}, limit {limit:?}");
    Ok(())
}

fn c1_lbp_oracle() -> Check {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    // Counter-clockwise from the top-left corner, bit p for neighbor p.
    let ring = [(-1, -1), (0, -1), (1, -1), (1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0)];
    let mut checked = 0;
    for _ in 0..100 {
        let img = random_image(&mut rng, 8, 8, 4);
        let fg = BinaryImage::from_fn(8, 8, |_, _| true).unwrap();
        let m = lbp_map(&img, &fg).map_err(|e| e.to_string())?;
        for _ in 0..10 {
            let (x, y) = (rng.gen_range(1..7), rng.gen_range(1..7));
            let c = img.get(x, y) as i32;
            let mut code = 0u32;
            for (p, (dx, dy)) in ring.iter().enumerate() {
                let n = img.get((x as i32 + dx) as usize, (y as i32 + dy) as usize) as i32;
                if n - c >= 0 {
                    code += 1 << p;
                }
            }
            ensure!(m.code(x, y) == Some(code as u8), "pixel ({x},{y}): {:?} vs {code}", m.code(x, y));
            checked += 1;
        }
    }
    ensure!(checked == 1000, "checked {checked}");
    within(t, Duration::from_secs(1), "LBP oracle")
}

fn c2_dimensions() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..12 {
        let (w, h) = (rng.gen_range(1..90), rng.gen_range(1..60));
        let img = random_image(&mut rng, w, h, 255);
        let (ix, iy) = (rng.gen_range(0..w), rng.gen_range(0..h));
        let fg = BinaryImage::from_fn(w, h, |x, y| (x, y) == (ix, iy) || rng.gen_bool(0.3)).unwrap();
        let lbp = lbp_feature(&img, &fg).map_err(|e| e.to_string())?;
        let hot = quadtree_hot(&img, &fg, &TemplateSet::standard()).map_err(|e| e.to_string())?;
        let dmb = dense_mblbp_feature(&img, &fg).map_err(|e| e.to_string())?;
        ensure!(lbp.values().len() == 255, "lbp {} on {w}x{h}", lbp.values().len());
        ensure!(hot.values().len() == 200, "hot {} on {w}x{h}", hot.values().len());
        ensure!(dmb.values().len() == 10_240, "dmb {} on {w}x{h}", dmb.values().len());
    }
    Ok(())
}

fn sobel_oracle(img: &RasterImage, x: usize, y: usize) -> i64 {
    let g = |dx: i64, dy: i64| img.get((x as i64 + dx) as usize, (y as i64 + dy) as usize) as i64;
    let gx = (g(1, -1) + 2 * g(1, 0) + g(1, 1)) - (g(-1, -1) + 2 * g(-1, 0) + g(-1, 1));
    let gy = (g(-1, 1) + 2 * g(0, 1) + g(1, 1)) - (g(-1, -1) + 2 * g(0, -1) + g(1, -1));
    gx * gx + gy * gy
}

fn c3_hot_oracle() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let templates = TemplateSet::standard();
    let n = 12;
    for round in 0..51 {
        let img = if round == 50 {
            RasterImage::filled(n, n, 77).unwrap()
        } else {
            random_image(&mut rng, n, n, 6)
        };
        let counts = hot_counts(&img, &sobel_magnitude_sq(&img), Rect::new(0, 0, n, n), &templates);
        let mut oracle = [0u32; 40];
        let interior = |v: i64| v >= 1 && v <= n as i64 - 2;
        for y in 1..n - 1 {
            for x in 1..n - 1 {
                for (t, &((ax, ay), (bx, by))) in templates.pairs().iter().enumerate() {
                    let (ax, ay, bx, by) = (ax as i64, ay as i64, bx as i64, by as i64);
                    let (p1, p2) = ((x as i64 + ax, y as i64 + ay), (x as i64 + bx, y as i64 + by));
                    let px = |p: (i64, i64)| img.get(p.0 as usize, p.1 as usize);
                    if img.get(x, y) > px(p1) && img.get(x, y) > px(p2) {
                        oracle[t] += 1;
                    }
                    if interior(p1.0) && interior(p1.1) && interior(p2.0) && interior(p2.1) {
                        let z = sobel_oracle(&img, x, y);
                        let g = |p: (i64, i64)| sobel_oracle(&img, p.0 as usize, p.1 as usize);
                        if z > g(p1) && z > g(p2) {
                            oracle[20 + t] += 1;
                        }
                    }
                }
            }
        }
        ensure!(counts == oracle, "image {round}: {counts:?} vs {oracle:?}");
        if round == 50 {
            ensure!(counts.iter().all(|&c| c == 0), "constant image gave {counts:?}");
        }
    }
    Ok(())
}

fn c4_lssvm() -> Check {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for inst in 0..100 {
        let n = rng.gen_range(2..=200);
        let d = rng.gen_range(1..8);
        let x: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
        let mut y: Vec<f64> = (0..n).map(|_| if rng.gen_bool(0.5) { 1.0 } else { -1.0 }).collect();
        y[0] = 1.0;
        y[1] = -1.0;
        let k = if inst % 2 == 0 {
            KernelConfig::rbf(rng.gen_range(0.05..2.0), rng.gen_range(0.5..100.0))
        } else {
            KernelConfig::linear(rng.gen_range(0.5..100.0))
        };
        let m = train_lssvm(&x, &y, k, Script::Rom).map_err(|e| e.to_string())?;
        // Support vectors are stored as f32; rebuild the system from them.
        let sv: Vec<Vec<f64>> = (0..n).map(|i| m.support.row(i).iter().map(|&v| v as f64).collect()).collect();
        let mut r2 = m.alphas.iter().sum::<f64>().powi(2);
        for i in 0..n {
            let mut s = m.bias + m.alphas[i] / k.reg;
            for j in 0..n {
                s += kernel(&sv[i], &sv[j], &k).map_err(|e| e.to_string())? * m.alphas[j];
            }
            r2 += (s - y[i]).powi(2);
        }
        let rel = r2.sqrt() / (y.iter().map(|v| v * v).sum::<f64>()).sqrt();
        ensure!(rel <= 1e-8, "instance {inst} (n={n}): residual {rel:e}");
        let neg: Vec<f64> = y.iter().map(|v| -v).collect();
        let mn = train_lssvm(&x, &neg, k, Script::Rom).map_err(|e| e.to_string())?;
        ensure!(mn.bias == -m.bias, "instance {inst}: bias {} vs {}", mn.bias, m.bias);
        ensure!(
            mn.alphas.iter().zip(&m.alphas).all(|(a, b)| *a == -*b),
            "instance {inst}: alphas not negated"
        );
    }
    within(t, Duration::from_secs(5), "LS-SVM instances")
}

/// Runs the desk benchmark into `out`, returning the Task 3 reports.
fn desk_benchmark(root: &Path, out: &Path) -> Result<(Manifest, Vec<EvalReport>), String> {
    let spec = SynthSpec::new(4, 5, 8, 6, 13);
    let m = synth_corpus(&spec, root).map_err(|e| e.to_string())?;
    let splits = select_all(&m, DEFAULT_BUDGET, None).map_err(|e| e.to_string())?;
    let b = BenchmarkRegistry::standard().get("1").map_err(|e| e.to_string())?;
    let reports = run_task(Task::Single, b.as_ref(), &m, &splits, &RunOptions::default()).map_err(|e| e.to_string())?;
    write_reports(out, &m, &reports, true).map_err(|e| e.to_string())?;
    Ok((m, reports))
}

fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// Nearest-centroid rank-1 on zoned LBP features of printed lines, using the
/// same split as the benchmark.
fn nearest_centroid_lines(m: &Manifest) -> Result<f64, String> {
    let splits = select_training(m, Level::Line, Modality::Printed, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    let feat = |r: &ManifestRecord| -> Result<Vec<f64>, String> {
        let img = scriptid::imagecore::io::read_png(&r.path, None).map_err(|e| e.to_string())?;
        let fg = binarize(&img, 31, 0.2).map_err(|e| e.to_string())?;
        let eq = scriptid::imagecore::equalize_ink(&fg).map_err(|e| e.to_string())?;
        Ok(lbp_feature(&eq, &fg).map_err(|e| e.to_string())?.into_values())
    };
    let recs = m.records();
    let mut centroids = BTreeMap::new();
    for (&(s, _, _), cell) in &splits.cells {
        let mut c = vec![0.0; 255];
        for &i in &cell.train {
            for (a, v) in c.iter_mut().zip(feat(&recs[i])?) {
                *a += v / cell.train.len() as f64;
            }
        }
        centroids.insert(s, c);
    }
    let (mut hit, mut total) = (0, 0);
    for (&(s, _, _), cell) in &splits.cells {
        for &i in &cell.test {
            let f = feat(&recs[i])?;
            let best = centroids
                .iter()
                .min_by(|a, b| l1(a.1, &f).total_cmp(&l1(b.1, &f)))
                .map(|(s, _)| *s)
                .unwrap();
            hit += usize::from(best == s);
            total += 1;
        }
    }
    Ok(100.0 * hit as f64 / total as f64)
}

fn c5_desk_benchmark(root: &Path, out: &Path) -> Check {
    let t = Instant::now();
    let (m, reports) = desk_benchmark(root, out)?;
    let elapsed = t.elapsed();
    ensure!(m.len() == 20 + 160 + 960, "manifest has {} records", m.len());
    let cell = reports[0].tests[4].as_ref().ok_or("no printed-lines cell")?;
    println!(
        "  printed lines: rank-1 {:.2}% over {} held-out lines, {elapsed:?}",
        cell.cmc[0],
        cell.samples.len()
    );
    // Lines of documents that were never used for training in any form.
    let splits = select_all(&m, DEFAULT_BUDGET, None).map_err(|e| e.to_string())?;
    let recs = m.records();
    let train_docs: Vec<(Script, u32)> = splits
        .cells
        .iter()
        .filter(|(k, _)| k.1 != Level::Word)
        .flat_map(|(_, c)| c.train.iter().map(|&i| (recs[i].script(), recs[i].name.doc)))
        .collect();
    let unseen: Vec<_> = cell
        .samples
        .iter()
        .filter(|s| !train_docs.contains(&(recs[s.record].script(), recs[s.record].name.doc)))
        .collect();
    if !unseen.is_empty() {
        let hits = unseen.iter().filter(|s| s.scores.argmax() == s.truth).count();
        println!(
            "  lines of documents unseen in training: {:.2}% of {}",
            100.0 * hits as f64 / unseen.len() as f64,
            unseen.len()
        );
    }
    let nc = nearest_centroid_lines(&m)?;
    println!("  nearest-centroid LBP oracle on the same split: {nc:.2}%");
    ensure!(nc >= 90.0, "nearest-centroid oracle {nc:.2}% < 90%");
    ensure!(cell.cmc[0] >= 90.0, "rank-1 {:.2}% < 90%", cell.cmc[0]);
    ensure!(elapsed < Duration::from_secs(120), "took {elapsed:?}");
    Ok(())
}

fn banded_page(bands: usize) -> BinaryImage {
    let (band_h, gap) = (12, 40);
    BinaryImage::from_fn(200, 10 + bands * (band_h + gap), |x, y| {
        y >= 10 && (y - 10) % (band_h + gap) < band_h && (10..190).contains(&x) && (x - 10) % 7 < 4
    })
    .unwrap()
}

fn two_blocks(h: usize, gap: usize) -> BinaryImage {
    BinaryImage::from_fn(20 + gap, h, |x, _| x < 10 || x >= 10 + gap).unwrap()
}

fn c6_segmentation() -> Check {
    let lines = segment_lines(&banded_page(5));
    ensure!(lines.len() == 5, "{} lines", lines.len());
    for h in [12, 30, 31] {
        let keep = split_words(&two_blocks(h, h / 3)).len();
        let split = split_words(&two_blocks(h, h / 3 + 1)).len();
        ensure!(keep == 1 && split == 2, "h={h}: gap {} gives {keep}, gap {} gives {split}", h / 3, h / 3 + 1);
    }
    Ok(())
}

fn char_line(chars: usize) -> Region {
    let mask = BinaryImage::from_fn(chars * 8, 10, |x, y| x % 8 < 5 && (2..8).contains(&y)).unwrap();
    Region::from_page_mask(&mask, Level::Line, vec![1]).unwrap()
}

fn c7_pseudo_words() -> Check {
    ensure!(Script::Tha.pseudo_words() && Script::Jap.pseudo_words(), "pseudo-word flags");
    for (n, expect) in [(9, vec![2, 3, 4]), (12, vec![2, 3, 4, 2, 1])] {
        ensure!(pseudo_word_sizes(n) == expect, "{n}: {:?}", pseudo_word_sizes(n));
        let groups: Vec<usize> = pseudo_segment(&char_line(n))
            .iter()
            .map(|r| scriptid::imagecore::connected_components(&r.mask, scriptid::imagecore::Connectivity::Eight).count())
            .collect();
        ensure!(groups == expect, "{n} characters grouped {groups:?}");
    }
    Ok(())
}

fn c8_metrics(root: &Path) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..200 {
        let n = rng.gen_range(1..50);
        let scores: Vec<ScoreVector> = (0..n)
            .map(|_| ScoreVector(std::array::from_fn(|_| rng.gen_range(-3..3) as f64)))
            .collect();
        let truths: Vec<Script> = (0..n).map(|_| Script::ALL[rng.gen_range(0..SCRIPT_COUNT)]).collect();
        let c = cmc(&scores, &truths).map_err(|e| e.to_string())?;
        ensure!(c.windows(2).all(|w| w[0] <= w[1]) && c[12] == 100.0, "cmc {c:?}");
        let preds: Vec<Script> = scores.iter().map(ScoreVector::argmax).collect();
        let cm = confusion(&preds, &truths).map_err(|e| e.to_string())?;
        let mut rows = Vec::new();
        for s in Script::ALL {
            let idx: Vec<usize> = (0..n).filter(|&i| truths[i] == s).collect();
            if !idx.is_empty() {
                rows.push(100.0 * idx.iter().filter(|&&i| preds[i] == s).count() as f64 / idx.len() as f64);
            }
        }
        let oracle = rows.iter().sum::<f64>() / rows.len() as f64;
        ensure!((hit_ratio(&cm) - oracle).abs() < 1e-9, "hit ratio {} vs {oracle}", hit_ratio(&cm));
    }

    let spec = SynthSpec::new(3, 2, 3, 3, 13).with_modalities(&Modality::ALL);
    let m = synth_corpus(&spec, root).map_err(|e| e.to_string())?;
    let splits = select_all(&m, 100_000, None).map_err(|e| e.to_string())?;
    let b = BenchmarkRegistry::standard().get("lbp-hot").map_err(|e| e.to_string())?;
    for (task, expect) in [(Task::PerType, 36), (Task::Single, 6)] {
        let reports = run_task(task, b.as_ref(), &m, &splits, &RunOptions::default()).map_err(|e| e.to_string())?;
        let cells: usize = reports.iter().map(|r| r.tests.iter().flatten().count()).sum();
        ensure!(cells == expect, "task {task}: {cells} cells");
        for t in reports.iter().flat_map(|r| r.tests.iter().flatten()) {
            let n = t.samples.len() as f64;
            let hits = t.samples.iter().filter(|s| s.scores.argmax() == s.truth).count() as f64;
            ensure!((t.weighted_diagonal - 100.0 * hits / n).abs() < 1e-9, "weighted diagonal");
        }
    }
    Ok(())
}

fn fixture_record(script: Script, modality: Modality, name: SampleName, fg: u64) -> ManifestRecord {
    ManifestRecord {
        path: PathBuf::from(format!("/mock/{modality}/{}/{}", script.abbrev(), name.file_name())),
        name,
        modality,
        fg_pixels: fg,
    }
}

fn c9_splits() -> Check {
    let recs = [1_500_000, 800_000, 300_000]
        .iter()
        .enumerate()
        .map(|(i, &p)| fixture_record(Script::Arab, Modality::Printed, SampleName::line(Script::Arab, 1, i as u32 + 1), p))
        .collect();
    let m = Manifest::new(recs).map_err(|e| e.to_string())?;
    let s = select_training(&m, Level::Line, Modality::Printed, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    let cell = &s.cells[&(Script::Arab, Level::Line, Modality::Printed)];
    ensure!(cell.train == vec![0, 1], "selected {:?}", cell.train);

    // One more sample per cell than the preset trains on.
    let preset = Preset::Mdiw13Table4;
    let mut recs = Vec::new();
    for script in Script::ALL {
        for modality in Modality::ALL {
            for level in Level::ALL {
                let n = preset.count(script, level, modality) as u32 + 1;
                for i in 0..n {
                    let name = match level {
                        Level::Doc => SampleName::doc(script, i + 1),
                        Level::Line => SampleName::line(script, 1 + i / 500, 1 + i % 500),
                        Level::Word => SampleName::word(script, 1, 1 + i / 500, 1 + i % 500),
                    };
                    recs.push(fixture_record(script, modality, name, 1000));
                }
            }
        }
    }
    let m = Manifest::new(recs).map_err(|e| e.to_string())?;
    let s = select_all(&m, DEFAULT_BUDGET, Some(preset)).map_err(|e| e.to_string())?;
    let got = |sc, l, md| s.cells[&(sc, l, md)].train.len();
    ensure!(got(Script::Arab, Level::Doc, Modality::Handwritten) == 5, "Arab handwritten docs");
    ensure!(got(Script::Ban, Level::Word, Modality::Printed) == 1608, "Ban printed words");
    ensure!(got(Script::Arab, Level::Line, Modality::Printed) == 256, "Arab printed lines");
    let totals: Vec<usize> = Modality::ALL
        .iter()
        .flat_map(|&md| Level::ALL.map(|l| Script::ALL.iter().map(|&sc| got(sc, l, md)).sum()))
        .collect();
    ensure!(totals == vec![67, 1396, 8871, 397, 3716, 21_974], "column totals {totals:?}");
    for (&k, cell) in &s.cells {
        ensure!(cell.test.len() == 1, "{k:?} tests {}", cell.test.len());
    }
    Ok(())
}

fn tree_bytes(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.insert(p.strip_prefix(dir).unwrap().to_path_buf(), std::fs::read(&p).unwrap());
            }
        }
    }
    out
}

fn c10_reproducible(first: &Path, work: &Path) -> Check {
    let out = work.join("reports_b");
    desk_benchmark(&work.join("corpus_b"), &out)?;
    let (a, b) = (tree_bytes(first), tree_bytes(&out));
    ensure!(!a.is_empty(), "first run wrote no reports");
    ensure!(a.keys().eq(b.keys()), "report file sets differ");
    for (k, v) in &a {
        ensure!(b[k] == *v, "{} differs", k.display());
    }
    let (ca, cb) = (tree_bytes(&work.join("corpus_a")), tree_bytes(&work.join("corpus_b")));
    ensure!(ca.len() == cb.len() && ca.iter().zip(&cb).all(|(x, y)| x.1 == y.1), "corpora differ");
    Ok(())
}

fn report(id: usize, name: &str, result: Check) -> bool {
    match result {
        Ok(()) => {
            println!("criterion {id:>2} PASS {name}");
            true
        }
        Err(e) => {
            println!("criterion {id:>2} FAIL {name}: {e}");
            false
        }
    }
}

#[test]
fn acceptance() {
    let work = tempfile::tempdir().unwrap();
    let w = work.path();
    let results = [
        report(1, "LBP oracle equivalence", c1_lbp_oracle()),
        report(2, "feature dimensions", c2_dimensions()),
        report(3, "HOT count oracle", c3_hot_oracle()),
        report(4, "LS-SVM residual and label negation", c4_lssvm()),
        report(5, "desk benchmark rank-1", c5_desk_benchmark(&w.join("corpus_a"), &w.join("reports_a"))),
        report(6, "segmentation exactness", c6_segmentation()),
        report(7, "pseudo-word grouping", c7_pseudo_words()),
        report(8, "metric identities and report shape", c8_metrics(&w.join("small"))),
        report(9, "split determinism and preset", c9_splits()),
        report(10, "reproducible reports", c10_reproducible(&w.join("reports_a"), w)),
    ];
    let failed: Vec<usize> = (1..=10).filter(|&i| !results[i - 1]).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
