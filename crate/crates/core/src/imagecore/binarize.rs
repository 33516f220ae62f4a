use super::components::{connected_components, Connectivity};
use super::raster::{BinaryImage, RasterImage};
use crate::error::{Error, Result};

pub const DEFAULT_WINDOW: usize = 31;
pub const DEFAULT_SENSITIVITY: f64 = 0.2;

/// Local windows whose standard deviation is below this many gray levels
/// carry no local contrast and are decided by the global Otsu split instead.
const FLAT_WINDOW_STD: f64 = 1.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BinarizeParams {
    pub window: usize,
    pub sensitivity: f64,
}

impl Default for BinarizeParams {
    fn default() -> Self {
        Self {
            window: DEFAULT_WINDOW,
            sensitivity: DEFAULT_SENSITIVITY,
        }
    }
}

/// Marks dark-on-light ink as foreground.
///
/// A pixel is ink when its intensity is below `local_mean · (1 − sensitivity)`
/// over a `window × window` neighborhood clipped to the image. Windows with no
/// contrast (the inside of a blob wider than the window) fall back to the
/// global Otsu threshold, and a globally flat image is all background. A single
/// cleanup pass then drops 8-connected specks whose width and height are both
/// under half the estimated stroke width.
pub fn binarize(img: &RasterImage, window: usize, sensitivity: f64) -> Result<BinaryImage> {
    if window < 3 || window.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "window must be odd and >= 3, got {window}"
        )));
    }
    if !(sensitivity > 0.0 && sensitivity < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "sensitivity must lie in (0, 1), got {sensitivity}"
        )));
    }
    let (w, h) = (img.width(), img.height());
    let integral = IntegralImage::new(img);
    let global = otsu_threshold(img);
    let half = window / 2;
    let scale = 1.0 - sensitivity;

    let mut mask = Vec::with_capacity(w * h);
    for y in 0..h {
        let (y0, y1) = (y.saturating_sub(half), (y + half + 1).min(h));
        for x in 0..w {
            let (x0, x1) = (x.saturating_sub(half), (x + half + 1).min(w));
            let n = ((x1 - x0) * (y1 - y0)) as f64;
            let (sum, sq) = integral.sums(x0, y0, x1, y1);
            let mean = sum as f64 / n;
            let var = (sq as f64 / n - mean * mean).max(0.0);
            let v = img.get(x, y);
            let ink = if var.sqrt() < FLAT_WINDOW_STD {
                global.is_some_and(|t| v <= t)
            } else {
                (v as f64) < mean * scale
            };
            mask.push(ink);
        }
    }
    let raw = BinaryImage::new(w, h, img.dpi(), mask)?;
    Ok(remove_specks(&raw))
}

pub fn binarize_with(img: &RasterImage, params: BinarizeParams) -> Result<BinaryImage> {
    binarize(img, params.window, params.sensitivity)
}

fn remove_specks(bin: &BinaryImage) -> BinaryImage {
    let Ok(stroke) = estimate_stroke_width(bin) else {
        return bin.clone();
    };
    let cs = connected_components(bin, Connectivity::Eight);
    let mut out = bin.clone();
    for (i, c) in cs.components().iter().enumerate() {
        if 2 * c.bbox.width() < stroke && 2 * c.bbox.height() < stroke {
            let id = i as u32 + 1;
            for (x, y) in cs.pixels(id) {
                out.set(x, y, false);
            }
        }
    }
    out
}

/// Mode of the horizontal foreground run-length histogram; ties go to the
/// shorter run.
pub fn estimate_stroke_width(bin: &BinaryImage) -> Result<usize> {
    if bin.is_blank() {
        return Err(Error::BlankImage);
    }
    let hist = horizontal_run_lengths(bin);
    let (best, _) = hist
        .iter()
        .enumerate()
        .skip(1)
        .fold((0, 0), |(bl, bc), (len, &c)| {
            if c > bc {
                (len, c)
            } else {
                (bl, bc)
            }
        });
    Ok(best)
}

/// `hist[len]` = number of maximal horizontal foreground runs of length `len`.
pub fn horizontal_run_lengths(bin: &BinaryImage) -> Vec<usize> {
    let mut hist = vec![0usize; bin.width() + 1];
    for y in 0..bin.height() {
        let mut run = 0;
        for x in 0..bin.width() {
            if bin.get(x, y) {
                run += 1;
            } else if run > 0 {
                hist[run] += 1;
                run = 0;
            }
        }
        if run > 0 {
            hist[run] += 1;
        }
    }
    hist
}

/// Otsu's global threshold: ink is `v <= t`. `None` for a single-level image.
pub fn otsu_threshold(img: &RasterImage) -> Option<u8> {
    let mut hist = [0u64; 256];
    for &p in img.pixels() {
        hist[p as usize] += 1;
    }
    let total = img.pixels().len() as f64;
    let sum_all: f64 = hist.iter().enumerate().map(|(v, &c)| v as f64 * c as f64).sum();
    let (mut w0, mut sum0) = (0.0, 0.0);
    let mut best: Option<(u8, f64)> = None;
    for t in 0..255usize {
        w0 += hist[t] as f64;
        sum0 += t as f64 * hist[t] as f64;
        let w1 = total - w0;
        if w0 == 0.0 || w1 == 0.0 {
            continue;
        }
        let m0 = sum0 / w0;
        let m1 = (sum_all - sum0) / w1;
        let between = w0 * w1 * (m0 - m1) * (m0 - m1);
        if best.is_none_or(|(_, b)| between > b) {
            best = Some((t as u8, between));
        }
    }
    best.map(|(t, _)| t)
}

struct IntegralImage {
    stride: usize,
    sum: Vec<u64>,
    sq: Vec<u64>,
}

impl IntegralImage {
    fn new(img: &RasterImage) -> Self {
        let (w, h) = (img.width(), img.height());
        let stride = w + 1;
        let mut sum = vec![0u64; stride * (h + 1)];
        let mut sq = vec![0u64; stride * (h + 1)];
        for y in 0..h {
            let (mut rs, mut rq) = (0u64, 0u64);
            for x in 0..w {
                let v = img.get(x, y) as u64;
                rs += v;
                rq += v * v;
                sum[(y + 1) * stride + x + 1] = sum[y * stride + x + 1] + rs;
                sq[(y + 1) * stride + x + 1] = sq[y * stride + x + 1] + rq;
            }
        }
        Self { stride, sum, sq }
    }

    fn sums(&self, x0: usize, y0: usize, x1: usize, y1: usize) -> (u64, u64) {
        let s = self.stride;
        let rect = |t: &[u64]| t[y1 * s + x1] + t[y0 * s + x0] - t[y0 * s + x1] - t[y1 * s + x0];
        (rect(&self.sum), rect(&self.sq))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn white_image_has_no_ink() {
        let img = RasterImage::filled(64, 64, 255).unwrap();
        let b = binarize(&img, 31, 0.2).unwrap();
        assert_eq!(b.foreground_count(), 0);
    }

    #[test]
    fn constant_dark_image_has_no_ink() {
        let img = RasterImage::filled(20, 20, 10).unwrap();
        assert!(binarize(&img, 5, 0.2).unwrap().is_blank());
    }

    #[test]
    fn rejects_bad_window() {
        let img = RasterImage::filled(8, 8, 255).unwrap();
        assert!(binarize(&img, 4, 0.2).is_err());
        assert!(binarize(&img, 1, 0.2).is_err());
        assert!(binarize(&img, 3, 1.0).is_err());
    }

    #[test]
    fn two_level_stroke_matches_otsu() {
        let stroke = |x: usize, y: usize| (20..26).contains(&y) && (10..90).contains(&x)
            || (40..46).contains(&x) && (5..60).contains(&y);
        let img = RasterImage::from_fn(100, 64, |x, y| if stroke(x, y) { 40 } else { 230 }).unwrap();
        let b = binarize(&img, 31, 0.2).unwrap();
        // Reference: a global Otsu split of a two-level image separates the levels.
        let t = otsu_threshold(&img).unwrap();
        assert!((40..230).contains(&t));
        for y in 0..64 {
            for x in 0..100 {
                assert_eq!(b.get(x, y), img.get(x, y) <= t, "({x},{y})");
            }
        }
    }

    #[test]
    fn checkerboard_window3_matches_local_mean_rule() {
        let img = RasterImage::from_fn(9, 7, |x, y| if (x + y) % 2 == 0 { 0 } else { 255 }).unwrap();
        let b = binarize(&img, 3, 0.2).unwrap();
        for y in 0..7usize {
            for x in 0..9usize {
                let mut s = 0.0;
                let mut n = 0.0;
                for yy in y.saturating_sub(1)..(y + 2).min(7) {
                    for xx in x.saturating_sub(1)..(x + 2).min(9) {
                        s += img.get(xx, yy) as f64;
                        n += 1.0;
                    }
                }
                let oracle = (img.get(x, y) as f64) < 0.8 * s / n;
                assert_eq!(b.get(x, y), oracle);
                assert_eq!(b.get(x, y), img.get(x, y) == 0);
            }
        }
    }

    #[test]
    fn empty_raster_is_rejected_at_construction() {
        assert!(matches!(
            RasterImage::new(0, 0, 300.0, vec![]),
            Err(Error::EmptyRaster)
        ));
    }

    #[test]
    fn stroke_width_examples() {
        let bar = BinaryImage::from_fn(120, 10, |x, y| (3..6).contains(&y) && (10..110).contains(&x)).unwrap();
        assert_eq!(estimate_stroke_width(&bar).unwrap(), 100);

        let strokes = BinaryImage::from_fn(60, 50, |x, y| (5..45).contains(&y) && x % 6 < 2 && x < 60).unwrap();
        assert_eq!(estimate_stroke_width(&strokes).unwrap(), 2);

        // 30 runs of length 2 and 30 of length 4, one pair per row.
        let mixed = BinaryImage::from_fn(12, 30, |x, _| (1..3).contains(&x) || (5..9).contains(&x)).unwrap();
        let hist = horizontal_run_lengths(&mixed);
        assert_eq!((hist[2], hist[4]), (30, 30));
        assert_eq!(estimate_stroke_width(&mixed).unwrap(), 2);

        let blank = BinaryImage::blank(5, 5, 300.0).unwrap();
        assert!(matches!(estimate_stroke_width(&blank), Err(Error::BlankImage)));
    }

    #[test]
    fn specks_below_half_stroke_are_removed() {
        // Thick 8-px strokes plus an isolated 2x2 speck.
        let img = RasterImage::from_fn(80, 40, |x, y| {
            let stroke = (10..18).contains(&y) && (5..75).contains(&x)
                || (25..33).contains(&y) && (5..75).contains(&x);
            let speck = (36..38).contains(&y) && (70..72).contains(&x);
            if stroke || speck { 20 } else { 240 }
        })
        .unwrap();
        let b = binarize(&img, 15, 0.2).unwrap();
        assert!(!b.get(70, 36));
        assert!(b.get(40, 12));
    }

    fn tally_mode(bin: &BinaryImage) -> usize {
        let mut counts = std::collections::BTreeMap::new();
        for y in 0..bin.height() {
            let row: Vec<bool> = (0..bin.width()).map(|x| bin.get(x, y)).collect();
            for run in row.split(|&b| !b).filter(|r| !r.is_empty()) {
                *counts.entry(run.len()).or_insert(0usize) += 1;
            }
        }
        let max = *counts.values().max().unwrap();
        *counts.iter().find(|(_, &c)| c == max).unwrap().0
    }

    proptest! {
        #[test]
        fn stroke_width_is_run_length_mode(bits in proptest::collection::vec(any::<bool>(), 24 * 16)) {
            let b = BinaryImage::new(24, 16, 300.0, bits).unwrap();
            prop_assume!(!b.is_blank());
            prop_assert_eq!(estimate_stroke_width(&b).unwrap(), tally_mode(&b));
        }

        #[test]
        fn rebinarizing_a_rendered_mask_is_idempotent(
            blobs in proptest::collection::vec((0usize..40, 0usize..30, 2usize..12, 2usize..9), 1..6),
        ) {
            let mut mask = BinaryImage::blank(48, 36, 300.0).unwrap();
            for (x0, y0, w, h) in blobs {
                for y in y0..(y0 + h).min(36) {
                    for x in x0..(x0 + w).min(48) {
                        mask.set(x, y, true);
                    }
                }
            }
            let once = binarize(&mask.to_raster(), 15, 0.2).unwrap();
            let twice = binarize(&once.to_raster(), 15, 0.2).unwrap();
            prop_assert_eq!(&once, &twice);
        }
    }
}
