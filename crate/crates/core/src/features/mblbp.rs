//! Multi-block LBP and its dense two-level pyramid.

use super::lbp::{LbpMap, NEIGHBORS};
use super::vector::{ExtractorKind, FeatureVector};
use crate::error::{Error, Result};
use crate::imagecore::{BinaryImage, RasterImage, Rect};

pub const MBLBP_BINS: usize = 256;

/// Summed-area table with a zero first row and column.
struct BlockSums {
    stride: usize,
    table: Vec<u64>,
}

impl BlockSums {
    fn new(img: &RasterImage) -> Self {
        let (w, h) = (img.width(), img.height());
        let stride = w + 1;
        let mut table = vec![0u64; stride * (h + 1)];
        for y in 0..h {
            let mut row = 0u64;
            for x in 0..w {
                row += img.get(x, y) as u64;
                table[(y + 1) * stride + x + 1] = table[y * stride + x + 1] + row;
            }
        }
        Self { stride, table }
    }

    /// Sum over `[x, x+b) × [y, y+b)`.
    fn block(&self, x: usize, y: usize, b: usize) -> u64 {
        let s = self.stride;
        self.table[(y + b) * s + x + b] + self.table[y * s + x]
            - self.table[y * s + x + b]
            - self.table[(y + b) * s + x]
    }
}

/// LBP on block sums: the code at `(x, y)` compares the `b×b` cell starting
/// there with the eight cells offset by `±b`. Positions whose neighborhood
/// leaves the image are invalid.
pub fn mblbp_map(img: &RasterImage, block: usize) -> Result<LbpMap> {
    if block == 0 {
        return Err(Error::InvalidParameter("block size must be at least 1".into()));
    }
    let (w, h) = (img.width(), img.height());
    let min = 3 * block;
    if w < min || h < min {
        return Err(Error::ImageTooSmall {
            width: w,
            height: h,
            min,
        });
    }
    let sums = BlockSums::new(img);
    let b = block as isize;
    let mut codes = vec![0u8; w * h];
    let mut valid = vec![false; w * h];
    for y in block..=h - 2 * block {
        for x in block..=w - 2 * block {
            let c = sums.block(x, y, block);
            let mut code = 0u8;
            for (p, &(dx, dy)) in NEIGHBORS.iter().enumerate() {
                let nx = (x as isize + dx * b) as usize;
                let ny = (y as isize + dy * b) as usize;
                if sums.block(nx, ny, block) >= c {
                    code |= 1 << p;
                }
            }
            codes[y * w + x] = code;
            valid[y * w + x] = true;
        }
    }
    Ok(LbpMap::from_parts(w, h, codes, valid))
}

/// 256-bin L1-normalized histogram of all valid codes; zeros when the image
/// is too small for `block` or has no valid position.
pub fn mblbp_histogram(img: &RasterImage, block: usize) -> Result<Vec<f64>> {
    let map = match mblbp_map(img, block) {
        Ok(m) => m,
        Err(Error::ImageTooSmall { .. }) => return Ok(vec![0.0; MBLBP_BINS]),
        Err(e) => return Err(e),
    };
    let mut counts = [0u64; MBLBP_BINS];
    let mut total = 0u64;
    for c in map.valid_codes() {
        counts[c as usize] += 1;
        total += 1;
    }
    if total == 0 {
        return Ok(vec![0.0; MBLBP_BINS]);
    }
    Ok(counts.iter().map(|&c| c as f64 / total as f64).collect())
}

/// Patch layout and block sizes of the dense descriptor.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMbLbp {
    pub scales: Vec<usize>,
    /// Patch origins and sizes as fractions of the region: `(fx, fy, fw, fh)`.
    pub patches: Vec<(f64, f64, f64, f64)>,
}

impl DenseMbLbp {
    /// One full patch plus a 3×3 grid of half-size patches at offsets
    /// 0, 1/4 and 1/2; block sizes 1 to 4.
    pub fn standard() -> Self {
        let mut patches = vec![(0.0, 0.0, 1.0, 1.0)];
        for fy in [0.0, 0.25, 0.5] {
            for fx in [0.0, 0.25, 0.5] {
                patches.push((fx, fy, 0.5, 0.5));
            }
        }
        Self {
            scales: vec![1, 2, 3, 4],
            patches,
        }
    }

    pub fn dim(&self) -> usize {
        self.scales.len() * self.patches.len() * MBLBP_BINS
    }

    pub fn patch_rects(&self, width: usize, height: usize) -> Vec<Rect> {
        let (w, h) = (width as f64, height as f64);
        self.patches
            .iter()
            .map(|&(fx, fy, fw, fh)| {
                let x0 = (fx * w).floor() as usize;
                let y0 = (fy * h).floor() as usize;
                let pw = (fw * w).floor() as usize;
                let ph = (fh * h).floor() as usize;
                Rect::new(x0, y0, (x0 + pw).min(width), (y0 + ph).min(height))
            })
            .collect()
    }

    /// Concatenated histograms, patch-major, then scale, then bin.
    pub fn extract(&self, img: &RasterImage, fg: &BinaryImage) -> Result<Vec<f64>> {
        if img.width() != fg.width() || img.height() != fg.height() {
            return Err(Error::DimensionMismatch {
                expected: img.width() * img.height(),
                actual: fg.width() * fg.height(),
            });
        }
        if fg.is_blank() {
            return Ok(vec![0.0; self.dim()]);
        }
        let mut out = Vec::with_capacity(self.dim());
        for rect in self.patch_rects(img.width(), img.height()) {
            if rect.is_empty() {
                out.extend(std::iter::repeat_n(0.0, self.scales.len() * MBLBP_BINS));
                continue;
            }
            let patch = img.crop(rect)?;
            for &b in &self.scales {
                out.extend(mblbp_histogram(&patch, b)?);
            }
        }
        Ok(out)
    }
}

impl Default for DenseMbLbp {
    fn default() -> Self {
        Self::standard()
    }
}

/// 10,240-dimensional dense multi-block LBP descriptor.
pub fn dense_mblbp_feature(img: &RasterImage, fg: &BinaryImage) -> Result<FeatureVector> {
    FeatureVector::new(ExtractorKind::Dmb10240, DenseMbLbp::standard().extract(img, fg)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::lbp::lbp_map;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_image(rng: &mut ChaCha8Rng, w: usize, h: usize) -> RasterImage {
        RasterImage::from_fn(w, h, |_, _| rng.gen()).unwrap()
    }

    fn full(w: usize, h: usize) -> BinaryImage {
        BinaryImage::from_fn(w, h, |_, _| true).unwrap()
    }

    #[test]
    fn block_one_is_plain_lbp() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..50 {
            let (w, h) = (rng.gen_range(3..20), rng.gen_range(3..20));
            let img = random_image(&mut rng, w, h);
            assert_eq!(mblbp_map(&img, 1).unwrap(), lbp_map(&img, &full(w, h)).unwrap());
        }
    }

    #[test]
    fn constant_image_codes() {
        let img = RasterImage::filled(24, 24, 140).unwrap();
        for b in 1..=4 {
            let m = mblbp_map(&img, b).unwrap();
            assert!(m.valid_codes().count() > 0);
            assert!(m.valid_codes().all(|c| c == 255));
        }
    }

    #[test]
    fn too_small_is_an_error() {
        let img = RasterImage::filled(8, 20, 0).unwrap();
        assert!(matches!(mblbp_map(&img, 3), Err(Error::ImageTooSmall { .. })));
        assert!(mblbp_map(&img, 2).is_ok());
    }

    /// Average-pools with a stride-1 b×b window, then applies the 3×3 LBP
    /// with neighbors b pooled pixels away.
    fn pool_then_lbp(img: &RasterImage, b: usize) -> Vec<Option<u8>> {
        let (w, h) = (img.width(), img.height());
        let (pw, ph) = (w - b + 1, h - b + 1);
        let mut pooled = vec![0.0f64; pw * ph];
        for y in 0..ph {
            for x in 0..pw {
                let mut s = 0.0;
                for j in 0..b {
                    for i in 0..b {
                        s += img.get(x + i, y + j) as f64;
                    }
                }
                pooled[y * pw + x] = s / (b * b) as f64;
            }
        }
        let mut out = vec![None; w * h];
        for y in 0..h {
            for x in 0..w {
                if x < b || y < b || x + b >= pw || y + b >= ph {
                    continue;
                }
                let c = pooled[y * pw + x];
                let mut code = 0u8;
                for (p, (dx, dy)) in NEIGHBORS.iter().enumerate() {
                    let nx = (x as isize + dx * b as isize) as usize;
                    let ny = (y as isize + dy * b as isize) as usize;
                    if pooled[ny * pw + nx] >= c {
                        code |= 1 << p;
                    }
                }
                out[y * w + x] = Some(code);
            }
        }
        out
    }

    #[test]
    fn matches_pool_then_lbp() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for b in 1..=4 {
            for _ in 0..20 {
                let img = random_image(&mut rng, 16, 16);
                let m = mblbp_map(&img, b).unwrap();
                let oracle = pool_then_lbp(&img, b);
                for y in 0..16 {
                    for x in 0..16 {
                        assert_eq!(m.code(x, y), oracle[y * 16 + x], "b={b} ({x},{y})");
                    }
                }
            }
        }
    }

    #[test]
    fn standard_patch_geometry() {
        let rects = DenseMbLbp::standard().patch_rects(100, 100);
        assert_eq!(rects.len(), 10);
        assert_eq!(rects[0], Rect::new(0, 0, 100, 100));
        let mut k = 1;
        for y0 in [0, 25, 50] {
            for x0 in [0, 25, 50] {
                assert_eq!(rects[k], Rect::new(x0, y0, x0 + 50, y0 + 50));
                k += 1;
            }
        }
        // Horizontally adjacent patches share a strip a quarter of the region wide.
        for row in 0..3 {
            for col in 0..2 {
                let (a, b) = (rects[1 + 3 * row + col], rects[2 + 3 * row + col]);
                let ix = a.x1.min(b.x1).saturating_sub(a.x0.max(b.x0));
                let iy = a.y1.min(b.y1).saturating_sub(a.y0.max(b.y0));
                assert_eq!((ix * 4, iy), (100, 50));
                assert_eq!(ix * iy * 2, a.area());
            }
        }
    }

    #[test]
    fn dense_dimension_and_normalization() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for (w, h) in [(40, 30), (7, 100), (5, 5), (200, 13)] {
            let img = random_image(&mut rng, w, h);
            let f = dense_mblbp_feature(&img, &full(w, h)).unwrap();
            assert_eq!(f.values().len(), 10_240);
            for hist in f.values().chunks(256) {
                let s: f64 = hist.iter().sum();
                assert!(s == 0.0 || (s - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn dense_constant_image_is_indicator_of_flat_code() {
        let img = RasterImage::filled(64, 48, 90).unwrap();
        let f = dense_mblbp_feature(&img, &full(64, 48)).unwrap();
        for hist in f.values().chunks(256) {
            assert_eq!(hist[255], 1.0);
            assert_eq!(hist.iter().sum::<f64>(), 1.0);
        }
    }

    #[test]
    fn one_patch_one_scale_reduces_to_single_histogram() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let img = random_image(&mut rng, 30, 30);
        let cfg = DenseMbLbp {
            scales: vec![2],
            patches: vec![(0.0, 0.0, 1.0, 1.0)],
        };
        let v = cfg.extract(&img, &full(30, 30)).unwrap();
        assert_eq!(v, mblbp_histogram(&img, 2).unwrap());

        let map = mblbp_map(&img, 2).unwrap();
        let n = map.valid_codes().count() as f64;
        for code in 0..256 {
            let c = map.valid_codes().filter(|&k| k as usize == code).count() as f64;
            assert_eq!(v[code], c / n);
        }
    }

    #[test]
    fn blank_foreground_gives_zeros() {
        let img = RasterImage::filled(30, 30, 0).unwrap();
        let f = dense_mblbp_feature(&img, &BinaryImage::blank(30, 30, 300.0).unwrap()).unwrap();
        assert!(f.values().iter().all(|&v| v == 0.0));
    }
}
