use super::dct::dct2;
use super::vector::{ExtractorKind, FeatureVector};
use crate::error::{Error, Result};
use crate::imagecore::{BinaryImage, RasterImage};

/// Neighbor offsets `(dx, dy)`, clockwise from the top-left; bit `p` of a
/// code belongs to `NEIGHBORS[p]`.
pub const NEIGHBORS: [(isize, isize); 8] = [
    (-1, -1),
    (0, -1),
    (1, -1),
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
    (-1, 0),
];

/// Code of flat neighborhoods; dropped from the zoned histograms.
pub const FLAT_CODE: u8 = 255;

/// Number of kept bins in the zoned histograms (codes 0..=254).
pub const LBP_BINS: usize = 255;

/// Per-pixel codes with a validity mask.
#[derive(Clone, Debug, PartialEq)]
pub struct LbpMap {
    width: usize,
    height: usize,
    codes: Vec<u8>,
    valid: Vec<bool>,
}

impl LbpMap {
    pub(crate) fn from_parts(width: usize, height: usize, codes: Vec<u8>, valid: Vec<bool>) -> Self {
        Self {
            width,
            height,
            codes,
            valid,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Code at `(x, y)`, `None` where invalid.
    pub fn code(&self, x: usize, y: usize) -> Option<u8> {
        let i = y * self.width + x;
        self.valid[i].then_some(self.codes[i])
    }

    /// Valid codes in raster order, restricted to rows `y0..y1`.
    pub fn codes_in_rows(&self, y0: usize, y1: usize) -> impl Iterator<Item = u8> + '_ {
        let (a, b) = (y0.min(self.height) * self.width, y1.min(self.height) * self.width);
        self.codes[a..b]
            .iter()
            .zip(&self.valid[a..b])
            .filter_map(|(&c, &v)| v.then_some(c))
    }

    pub fn valid_codes(&self) -> impl Iterator<Item = u8> + '_ {
        self.codes_in_rows(0, self.height)
    }
}

/// 8-neighbor LBP at interior foreground pixels, with `s(0) = 1`.
pub fn lbp_map(img: &RasterImage, fg: &BinaryImage) -> Result<LbpMap> {
    let (w, h) = (img.width(), img.height());
    if fg.width() != w || fg.height() != h {
        return Err(Error::DimensionMismatch {
            expected: w * h,
            actual: fg.width() * fg.height(),
        });
    }
    let mut codes = vec![0u8; w * h];
    let mut valid = vec![false; w * h];
    let px = img.pixels();
    for y in 1..h.saturating_sub(1) {
        for x in 1..w.saturating_sub(1) {
            if !fg.get(x, y) {
                continue;
            }
            let c = px[y * w + x];
            let mut code = 0u8;
            for (p, &(dx, dy)) in NEIGHBORS.iter().enumerate() {
                let n = px[(y as isize + dy) as usize * w + (x as isize + dx) as usize];
                if n >= c {
                    code |= 1 << p;
                }
            }
            codes[y * w + x] = code;
            valid[y * w + x] = true;
        }
    }
    Ok(LbpMap::from_parts(w, h, codes, valid))
}

/// L1-normalized histogram of codes 0..=254 over rows `y0..y1`.
fn histogram_rows(m: &LbpMap, y0: usize, y1: usize) -> Result<Vec<f64>> {
    let mut counts = [0u64; LBP_BINS];
    let mut total = 0u64;
    for c in m.codes_in_rows(y0, y1) {
        if c != FLAT_CODE {
            counts[c as usize] += 1;
            total += 1;
        }
    }
    if total == 0 {
        return Err(Error::DegenerateFlatRegion);
    }
    Ok(counts.iter().map(|&c| c as f64 / total as f64).collect())
}

/// 255-bin normalized histogram of the map, flat code dropped.
pub fn lbp_histogram(m: &LbpMap) -> Result<Vec<f64>> {
    histogram_rows(m, 0, m.height())
}

/// Row ranges of the three overlapping horizontal zones: each 0.4·H tall,
/// starting at 0, 0.3·H and 0.6·H.
pub fn lbp_zones(height: usize) -> [(usize, usize); 3] {
    let h = height as f64;
    let band = (0.4 * h).round().max(1.0) as usize;
    std::array::from_fn(|k| {
        let y0 = ((0.3 * k as f64 * h).round() as usize).min(height);
        (y0, (y0 + band).min(height))
    })
}

/// Zoned LBP descriptor: three 255-bin zone histograms, concatenated, DCT
/// transformed, coefficients 1..=255 kept. Zones without non-flat codes
/// contribute zeros.
pub fn lbp_feature(img: &RasterImage, fg: &BinaryImage) -> Result<FeatureVector> {
    if fg.is_blank() {
        return Ok(FeatureVector::zeros(ExtractorKind::Lbp255));
    }
    let map = lbp_map(img, fg)?;
    let mut concat = Vec::with_capacity(3 * LBP_BINS);
    for (y0, y1) in lbp_zones(img.height()) {
        match histogram_rows(&map, y0, y1) {
            Ok(h) => concat.extend(h),
            Err(Error::DegenerateFlatRegion) => concat.extend([0.0; LBP_BINS]),
            Err(e) => return Err(e),
        }
    }
    let coeffs = dct2(&concat);
    FeatureVector::new(ExtractorKind::Lbp255, coeffs[1..=LBP_BINS].to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn full_fg(w: usize, h: usize) -> BinaryImage {
        BinaryImage::from_fn(w, h, |_, _| true).unwrap()
    }

    #[test]
    fn constant_image_codes_are_all_ones() {
        let img = RasterImage::filled(5, 5, 77).unwrap();
        let m = lbp_map(&img, &full_fg(5, 5)).unwrap();
        let codes: Vec<_> = m.valid_codes().collect();
        assert_eq!(codes.len(), 9);
        assert!(codes.iter().all(|&c| c == 255));
        assert_eq!(m.code(0, 0), None);
    }

    #[test]
    fn brighter_center_gives_zero() {
        let img = RasterImage::from_fn(3, 3, |x, y| if (x, y) == (1, 1) { 6 } else { 5 }).unwrap();
        let m = lbp_map(&img, &full_fg(3, 3)).unwrap();
        assert_eq!(m.code(1, 1), Some(0));
    }

    #[test]
    fn neighbor_order_is_clockwise_from_top_left() {
        // Only the right neighbor (p = 3) is not darker than the center.
        let img = RasterImage::from_fn(3, 3, |x, y| match (x, y) {
            (1, 1) => 100,
            (2, 1) => 200,
            _ => 0,
        })
        .unwrap();
        let m = lbp_map(&img, &full_fg(3, 3)).unwrap();
        assert_eq!(m.code(1, 1), Some(1 << 3));
    }

    #[test]
    fn background_pixels_are_invalid() {
        let img = RasterImage::filled(5, 5, 9).unwrap();
        let fg = BinaryImage::from_fn(5, 5, |x, y| (x, y) == (2, 2)).unwrap();
        let m = lbp_map(&img, &fg).unwrap();
        assert_eq!(m.valid_codes().count(), 1);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let img = RasterImage::filled(5, 5, 9).unwrap();
        assert!(matches!(
            lbp_map(&img, &full_fg(4, 5)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    fn map_of(codes: &[u8]) -> LbpMap {
        LbpMap::from_parts(codes.len(), 1, codes.to_vec(), vec![true; codes.len()])
    }

    #[test]
    fn histogram_examples() {
        let h = lbp_histogram(&map_of(&[0, 0, 7, 254])).unwrap();
        assert_eq!(h.len(), 255);
        assert_eq!(h[0], 0.5);
        assert_eq!(h[7], 0.25);
        assert_eq!(h[254], 0.25);
        assert_eq!(h.iter().filter(|&&v| v != 0.0).count(), 3);
        assert!(matches!(
            lbp_histogram(&map_of(&[255, 255])),
            Err(Error::DegenerateFlatRegion)
        ));
    }

    #[test]
    fn histogram_matches_tally() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let codes: Vec<u8> = (0..200).map(|_| rng.gen()).collect();
            let mut tally = std::collections::HashMap::new();
            for &c in codes.iter().filter(|&&c| c != 255) {
                *tally.entry(c).or_insert(0usize) += 1;
            }
            let total: usize = tally.values().sum();
            let h = lbp_histogram(&map_of(&codes)).unwrap();
            for code in 0..255u8 {
                let expected = *tally.get(&code).unwrap_or(&0) as f64 / total as f64;
                assert_eq!(h[code as usize], expected);
            }
        }
    }

    #[test]
    fn zones_overlap_by_thirty_percent() {
        assert_eq!(lbp_zones(100), [(0, 40), (30, 70), (60, 100)]);
        assert_eq!(lbp_zones(10), [(0, 4), (3, 7), (6, 10)]);
    }

    fn direct_dct(v: &[f64]) -> Vec<f64> {
        let n = v.len() as f64;
        (0..v.len())
            .map(|k| {
                let c = if k == 0 { (1.0 / n).sqrt() } else { (2.0 / n).sqrt() };
                c * v
                    .iter()
                    .enumerate()
                    .map(|(i, x)| x * (std::f64::consts::PI * (2.0 * i as f64 + 1.0) * k as f64 / (2.0 * n)).cos())
                    .sum::<f64>()
            })
            .collect()
    }

    #[test]
    fn vertically_uniform_texture_gives_dct_of_tripled_histogram() {
        // Columns cycle through three intensities and every row is identical,
        // so all interior rows carry the same codes and the three zones have
        // the same histogram h.
        let (w, h) = (31, 50);
        let img = RasterImage::from_fn(w, h, |x, _| [10u8, 200, 90][x % 3]).unwrap();
        let fg = full_fg(w, h);
        let f = lbp_feature(&img, &fg).unwrap();
        assert_eq!(f.values().len(), 255);

        let map = lbp_map(&img, &fg).unwrap();
        let hist = lbp_histogram(&map).unwrap();
        let tripled: Vec<f64> = [hist.clone(), hist.clone(), hist].concat();
        let expected = direct_dct(&tripled);
        for (a, b) in f.values().iter().zip(&expected[1..256]) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn blank_foreground_gives_zero_vector() {
        let img = RasterImage::filled(20, 20, 0).unwrap();
        let fg = BinaryImage::blank(20, 20, 300.0).unwrap();
        assert!(lbp_feature(&img, &fg).unwrap().values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn flat_foreground_gives_zero_vector() {
        let img = RasterImage::filled(20, 20, 0).unwrap();
        let f = lbp_feature(&img, &full_fg(20, 20)).unwrap();
        assert!(f.values().iter().all(|&v| v == 0.0));
    }
}
