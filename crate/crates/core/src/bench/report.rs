//! CSV and SVG report files.

use std::fmt::Write as _;
use std::path::Path;

use super::protocol::{test_type_label, EvalReport, TEST_TYPES};
use crate::classify::KernelConfig;
use crate::corpus::Manifest;
use crate::error::{Error, Result};
use crate::{Script, SCRIPT_COUNT};

fn pct(v: f64) -> String {
    format!("{v:.2}")
}

/// `rbf/gamma/reg` or `linear/reg`, free of commas.
pub fn kernel_token(k: &KernelConfig) -> String {
    match k.gamma() {
        Some(g) => format!("rbf/{g:e}/{:e}", k.reg),
        None => format!("linear/{:e}", k.reg),
    }
}

fn stem(r: &EvalReport) -> String {
    format!("task{}_{}", r.task.number(), r.benchmark)
}

/// Rows = training configurations, columns = the six test types, values =
/// hit ratio in percent or `NA`.
pub fn task_table(reports: &[EvalReport]) -> String {
    let mut s = String::from("train_with");
    for &(m, l) in &TEST_TYPES {
        write!(s, ",{}", test_type_label(m, l)).unwrap();
    }
    s.push('\n');
    for r in reports {
        s.push_str(&r.train.label);
        for t in &r.tests {
            s.push(',');
            s.push_str(&t.as_ref().map_or("NA".into(), |t| pct(t.hit_ratio)));
        }
        s.push('\n');
    }
    s
}

/// Per-cell detail: sample count, hit ratio, rank-1 CMC and the
/// sample-weighted diagonal, plus the selected kernels.
pub fn cell_table(reports: &[EvalReport]) -> String {
    let mut s = String::from("train_with,test_with,samples,hit_ratio,cmc_rank1,weighted_diagonal,training_vectors,kernels\n");
    for r in reports {
        let kernels: Vec<String> = r.kernels.iter().map(|(k, c)| format!("{}:{}", k.name(), kernel_token(c))).collect();
        for (t, &(m, l)) in r.tests.iter().zip(&TEST_TYPES) {
            let label = test_type_label(m, l);
            match t {
                Some(t) => writeln!(
                    s,
                    "{},{label},{},{:.4},{:.4},{:.4},{},{}",
                    r.train.label,
                    t.samples.len(),
                    t.hit_ratio,
                    t.cmc[0],
                    t.weighted_diagonal,
                    r.training_vectors,
                    kernels.join(" ")
                ),
                None => writeln!(s, "{},{label},0,NA,NA,NA,{},{}", r.train.label, r.training_vectors, kernels.join(" ")),
            }
            .unwrap();
        }
    }
    s
}

pub fn confusion_csv(cm: &super::ConfusionMatrix) -> String {
    let mut s = String::from("true");
    for p in Script::ALL {
        write!(s, ",{}", p.abbrev()).unwrap();
    }
    s.push('\n');
    for t in Script::ALL {
        s.push_str(t.abbrev());
        for p in Script::ALL {
            write!(s, ",{}", pct(cm.percent(t, p))).unwrap();
        }
        s.push('\n');
    }
    s
}

pub fn cmc_csv(curve: &[f64; SCRIPT_COUNT]) -> String {
    let mut s = String::from("rank,percent\n");
    for (k, v) in curve.iter().enumerate() {
        writeln!(s, "{},{}", k + 1, pct(*v)).unwrap();
    }
    s
}

/// Per-sample scores: `sample,truth,predicted,rank` then one column per script.
pub fn predictions_csv(manifest: &Manifest, t: &super::TestOutcome) -> String {
    let mut s = String::from("sample,truth,predicted,rank");
    for p in Script::ALL {
        write!(s, ",{}", p.abbrev()).unwrap();
    }
    s.push('\n');
    for r in &t.samples {
        write!(
            s,
            "{},{},{},{}",
            manifest.records()[r.record].name,
            r.truth.abbrev(),
            r.scores.argmax().abbrev(),
            super::metrics::truth_rank(&r.scores, r.truth)
        )
        .unwrap();
        for v in r.scores.0 {
            write!(s, ",{v:.6}").unwrap();
        }
        s.push('\n');
    }
    s
}

const PALETTE: [&str; 6] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"];

/// CMC curves of one training configuration, one polyline per test type.
pub fn cmc_svg(r: &EvalReport) -> String {
    let (w, h, pad) = (480.0, 320.0, 40.0);
    let x = |k: usize| pad + (w - 2.0 * pad) * (k as f64) / (SCRIPT_COUNT - 1) as f64;
    let y = |v: f64| h - pad - (h - 2.0 * pad) * v / 100.0;
    let mut s = format!("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" font-family=\"sans-serif\" font-size=\"10\">\n");
    writeln!(s, "<rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>").unwrap();
    writeln!(
        s,
        "<polyline points=\"{},{} {},{} {},{}\" fill=\"none\" stroke=\"black\"/>",
        pad,
        pad,
        pad,
        h - pad,
        w - pad,
        h - pad
    )
    .unwrap();
    for k in 0..SCRIPT_COUNT {
        writeln!(s, "<text x=\"{:.1}\" y=\"{}\" text-anchor=\"middle\">{}</text>", x(k), h - pad + 14.0, k + 1).unwrap();
    }
    for v in [0, 50, 100] {
        writeln!(s, "<text x=\"{}\" y=\"{:.1}\" text-anchor=\"end\">{v}</text>", pad - 4.0, y(v as f64) + 3.0).unwrap();
    }
    writeln!(s, "<text x=\"{}\" y=\"14\" text-anchor=\"middle\">{} / {}</text>", w / 2.0, stem(r), r.train.label).unwrap();
    for (i, (t, &(m, l))) in r.tests.iter().zip(&TEST_TYPES).enumerate() {
        let Some(t) = t else { continue };
        let pts: Vec<String> = t.cmc.iter().enumerate().map(|(k, &v)| format!("{:.1},{:.1}", x(k), y(v))).collect();
        writeln!(
            s,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\"/>",
            pts.join(" "),
            PALETTE[i]
        )
        .unwrap();
        writeln!(
            s,
            "<text x=\"{}\" y=\"{:.1}\" fill=\"{}\">{}</text>",
            w - pad - 110.0,
            h - pad - 10.0 - 12.0 * (5 - i) as f64,
            PALETTE[i],
            test_type_label(m, l)
        )
        .unwrap();
    }
    s.push_str("</svg>\n");
    s
}

fn put(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Writes the task table, cell detail, confusion matrices, CMC curves,
/// per-sample predictions and, if asked, SVG plots. Returns the number of
/// evaluated cells.
pub fn write_reports(dir: &Path, manifest: &Manifest, reports: &[EvalReport], svg: bool) -> Result<usize> {
    let Some(first) = reports.first() else {
        return Ok(0);
    };
    let stem = stem(first);
    for sub in ["confusion", "cmc", "predictions"] {
        let d = dir.join(sub);
        std::fs::create_dir_all(&d).map_err(|e| Error::io(&d, e))?;
    }
    put(&dir.join(format!("{stem}.csv")), &task_table(reports))?;
    put(&dir.join(format!("{stem}_cells.csv")), &cell_table(reports))?;
    let mut cells = 0;
    for r in reports {
        for (t, &(m, l)) in r.tests.iter().zip(&TEST_TYPES) {
            let Some(t) = t else { continue };
            cells += 1;
            let name = format!("{stem}_{}__{}.csv", r.train.label, test_type_label(m, l));
            put(&dir.join("confusion").join(&name), &confusion_csv(&t.confusion))?;
            put(&dir.join("cmc").join(&name), &cmc_csv(&t.cmc))?;
            put(&dir.join("predictions").join(&name), &predictions_csv(manifest, t))?;
        }
        if svg {
            put(&dir.join("cmc").join(format!("{stem}_{}.svg", r.train.label)), &cmc_svg(r))?;
        }
    }
    Ok(cells)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::confusion;

    #[test]
    fn confusion_csv_layout() {
        let cm = confusion(&[Script::Arab, Script::Rom], &[Script::Arab, Script::Arab]).unwrap();
        let csv = confusion_csv(&cm);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 14);
        assert!(lines[0].starts_with("true,Arab,Ban"));
        assert!(lines[1].starts_with("Arab,50.00,0.00"));
        assert_eq!(lines[1].split(',').count(), 14);
    }

    #[test]
    fn kernel_tokens_have_no_commas() {
        assert_eq!(kernel_token(&KernelConfig::rbf(0.5, 8.0)), "rbf/5e-1/8e0");
        assert_eq!(kernel_token(&KernelConfig::linear(0.125)), "linear/1.25e-1");
    }

    #[test]
    fn cmc_csv_layout() {
        let csv = cmc_csv(&[100.0; SCRIPT_COUNT]);
        assert_eq!(csv.lines().count(), 14);
        assert_eq!(csv.lines().nth(13).unwrap(), "13,100.00");
    }
}
