//! Quad-tree histogram of templates.

use super::lbp::NEIGHBORS;
use super::vector::{ExtractorKind, FeatureVector};
use crate::error::{Error, Result};
use crate::imagecore::{BinaryImage, RasterImage, Rect};

pub const TEMPLATE_COUNT: usize = 20;
/// P-HOT followed by G-HOT.
pub const HOT_REGION_DIM: usize = 2 * TEMPLATE_COUNT;

/// Unordered pairs `{Z1, Z2}` of 8-neighborhood offsets compared against the
/// center pixel.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TemplateSet {
    pairs: Vec<((isize, isize), (isize, isize))>,
}

impl TemplateSet {
    /// All 28 neighbor pairs except the 8 that are adjacent on the ring, in
    /// lexicographic order of ring positions (clockwise from the top-left).
    pub fn standard() -> Self {
        let mut pairs = Vec::with_capacity(TEMPLATE_COUNT);
        for i in 0..8 {
            for j in i + 1..8 {
                let ring_gap = (j - i) % 8;
                if ring_gap == 1 || ring_gap == 7 {
                    continue;
                }
                pairs.push((NEIGHBORS[i], NEIGHBORS[j]));
            }
        }
        debug_assert_eq!(pairs.len(), TEMPLATE_COUNT);
        Self { pairs }
    }

    pub fn pairs(&self) -> &[((isize, isize), (isize, isize))] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

impl Default for TemplateSet {
    fn default() -> Self {
        Self::standard()
    }
}

/// Squared 3×3 Sobel magnitude; zero (and never compared) on the border.
pub fn sobel_magnitude_sq(img: &RasterImage) -> Vec<i64> {
    let (w, h) = (img.width(), img.height());
    let mut out = vec![0i64; w * h];
    let p = |x: usize, y: usize| img.get(x, y) as i64;
    for y in 1..h.saturating_sub(1) {
        for x in 1..w.saturating_sub(1) {
            let gx = p(x + 1, y - 1) + 2 * p(x + 1, y) + p(x + 1, y + 1)
                - p(x - 1, y - 1)
                - 2 * p(x - 1, y)
                - p(x - 1, y + 1);
            let gy = p(x - 1, y + 1) + 2 * p(x, y + 1) + p(x + 1, y + 1)
                - p(x - 1, y - 1)
                - 2 * p(x, y - 1)
                - p(x + 1, y - 1);
            out[y * w + x] = gx * gx + gy * gy;
        }
    }
    out
}

/// Raw template counts over the pixels of `cell`: P-HOT compares intensities
/// at every pixel off the image border, G-HOT compares Sobel magnitudes where
/// both template neighbors are off the border too. Neighbors may lie outside
/// the cell.
pub fn hot_counts(
    img: &RasterImage,
    grad: &[i64],
    cell: Rect,
    templates: &TemplateSet,
) -> [u32; HOT_REGION_DIM] {
    let (w, h) = (img.width(), img.height());
    let mut counts = [0u32; HOT_REGION_DIM];
    let px = img.pixels();
    let cell = cell.clamp_to(w, h);
    let at = |x: usize, y: usize, (dx, dy): (isize, isize)| {
        (y as isize + dy) as usize * w + (x as isize + dx) as usize
    };
    for y in cell.y0.max(1)..cell.y1.min(h.saturating_sub(1)) {
        for x in cell.x0.max(1)..cell.x1.min(w.saturating_sub(1)) {
            let i = y * w + x;
            let v = px[i];
            let has_grad = |(dx, dy): (isize, isize)| {
                let (nx, ny) = (x as isize + dx, y as isize + dy);
                nx >= 1 && ny >= 1 && nx + 1 < w as isize && ny + 1 < h as isize
            };
            for (t, &(a, b)) in templates.pairs().iter().enumerate() {
                if v > px[at(x, y, a)] && v > px[at(x, y, b)] {
                    counts[t] += 1;
                }
                if has_grad(a) && has_grad(b) {
                    let g = grad[i];
                    if g > grad[at(x, y, a)] && g > grad[at(x, y, b)] {
                        counts[TEMPLATE_COUNT + t] += 1;
                    }
                }
            }
        }
    }
    counts
}

fn l2_normalized(counts: &[u32]) -> Vec<f64> {
    let norm = counts.iter().map(|&c| (c as f64) * (c as f64)).sum::<f64>().sqrt();
    if norm == 0.0 {
        return vec![0.0; counts.len()];
    }
    counts.iter().map(|&c| c as f64 / norm).collect()
}

fn cell_has_ink(fg: &BinaryImage, cell: Rect) -> bool {
    (cell.y0..cell.y1).any(|y| (cell.x0..cell.x1).any(|x| fg.get(x, y)))
}

fn hot_cell(
    img: &RasterImage,
    fg: &BinaryImage,
    grad: &[i64],
    cell: Rect,
    templates: &TemplateSet,
) -> Vec<f64> {
    if cell.is_empty() || !cell_has_ink(fg, cell) {
        return vec![0.0; HOT_REGION_DIM];
    }
    l2_normalized(&hot_counts(img, grad, cell, templates))
}

/// L2-normalized `[P-HOT, G-HOT]` of the whole image; zeros when the mask
/// has no ink.
pub fn hot_region(img: &RasterImage, fg: &BinaryImage, templates: &TemplateSet) -> Result<Vec<f64>> {
    check_dims(img, fg)?;
    let grad = sobel_magnitude_sq(img);
    let all = Rect::new(0, 0, img.width(), img.height());
    Ok(hot_cell(img, fg, &grad, all, templates))
}

/// Foreground centroid, rounded and clamped to `[1, dim-2]` so that all four
/// quad-tree cells are non-degenerate.
pub fn equi_mass_split(fg: &BinaryImage) -> Result<(usize, usize)> {
    if fg.is_blank() {
        return Err(Error::BlankImage);
    }
    let (mut sx, mut sy) = (0u64, 0u64);
    for y in 0..fg.height() {
        for x in 0..fg.width() {
            if fg.get(x, y) {
                sx += x as u64;
                sy += y as u64;
            }
        }
    }
    let n = fg.foreground_count() as f64;
    let clamp = |v: f64, dim: usize| {
        let v = v.round() as usize;
        if dim >= 3 {
            v.clamp(1, dim - 2)
        } else {
            dim / 2
        }
    };
    Ok((clamp(sx as f64 / n, fg.width()), clamp(sy as f64 / n, fg.height())))
}

/// The four level-2 cells: top-left, top-right, bottom-left, bottom-right.
pub fn quadtree_cells(width: usize, height: usize, split: (usize, usize)) -> [Rect; 4] {
    let (cx, cy) = split;
    [
        Rect::new(0, 0, cx, cy),
        Rect::new(cx, 0, width, cy),
        Rect::new(0, cy, cx, height),
        Rect::new(cx, cy, width, height),
    ]
}

/// 200-dimensional descriptor: HOT of the whole region followed by the HOT
/// of the four cells around the foreground centroid.
pub fn quadtree_hot(img: &RasterImage, fg: &BinaryImage, templates: &TemplateSet) -> Result<FeatureVector> {
    check_dims(img, fg)?;
    if fg.is_blank() {
        return Ok(FeatureVector::zeros(ExtractorKind::Hot200));
    }
    let grad = sobel_magnitude_sq(img);
    let (w, h) = (img.width(), img.height());
    let mut values = Vec::with_capacity(5 * HOT_REGION_DIM);
    values.extend(hot_cell(img, fg, &grad, Rect::new(0, 0, w, h), templates));
    for cell in quadtree_cells(w, h, equi_mass_split(fg)?) {
        values.extend(hot_cell(img, fg, &grad, cell, templates));
    }
    FeatureVector::new(ExtractorKind::Hot200, values)
}

fn check_dims(img: &RasterImage, fg: &BinaryImage) -> Result<()> {
    if img.width() != fg.width() || img.height() != fg.height() {
        return Err(Error::DimensionMismatch {
            expected: img.width() * img.height(),
            actual: fg.width() * fg.height(),
        });
    }
    Ok(())
}
