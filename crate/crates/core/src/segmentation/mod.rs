//! Line extraction from document masks and word extraction from lines.

mod lines;
mod profile;
mod words;

pub use lines::{segment_lines, segment_lines_with, LineParams};
pub use profile::{count_peaks, Axis, Profile};
pub use words::{pseudo_segment, pseudo_word_sizes, segment_words, split_words, PSEUDO_WORD_CYCLE};

use crate::corpus::Level;
use crate::imagecore::{BinaryImage, RasterImage, Rect};

/// A labeled sub-rectangle of a page together with its own foreground mask.
///
/// `bbox` is in page coordinates; `mask` covers exactly `bbox`. `index` is the
/// path of 1-based indices below the page (`[line]` or `[line, word]`).
#[derive(Clone, Debug, PartialEq)]
pub struct Region {
    pub level: Level,
    pub bbox: Rect,
    pub mask: BinaryImage,
    pub index: Vec<u32>,
}

impl Region {
    /// Region covering the tight bounding box of `page_mask`, `None` when blank.
    pub fn from_page_mask(page_mask: &BinaryImage, level: Level, index: Vec<u32>) -> Option<Region> {
        let bbox = page_mask.bounding_box()?;
        let mask = page_mask.crop(bbox).ok()?;
        Some(Region {
            level,
            bbox,
            mask,
            index,
        })
    }

    pub fn width(&self) -> usize {
        self.bbox.width()
    }

    pub fn height(&self) -> usize {
        self.bbox.height()
    }

    /// Pastes the region mask into a blank page-sized mask.
    pub fn page_mask(&self, width: usize, height: usize) -> BinaryImage {
        let mut m = BinaryImage::blank(width, height, self.mask.dpi()).expect("nonempty page");
        for y in 0..self.mask.height() {
            for x in 0..self.mask.width() {
                if self.mask.get(x, y) {
                    m.set(self.bbox.x0 + x, self.bbox.y0 + y, true);
                }
            }
        }
        m
    }

    /// Gray pixels of `page` inside the box; pixels off the mask become white.
    pub fn render_gray(&self, page: &RasterImage) -> RasterImage {
        let crop = page.crop(self.bbox).expect("region inside page");
        let pixels = crop
            .pixels()
            .iter()
            .zip(self.mask.mask())
            .map(|(&p, &m)| if m { p } else { 255 })
            .collect();
        RasterImage::new(crop.width(), crop.height(), page.dpi(), pixels).expect("same size")
    }

    /// Black ink on white.
    pub fn render_binary(&self) -> RasterImage {
        self.mask.to_raster()
    }
}
