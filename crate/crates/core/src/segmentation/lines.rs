use super::profile::{count_peaks, Profile};
use super::Region;
use crate::corpus::Level;
use crate::imagecore::{
    connected_components, dilate_h, erode_h, estimate_stroke_width, fill_component_hulls,
    BinaryImage, ComponentSet, Connectivity,
};

/// Tunables for [`segment_lines_with`], expressed as multiples of the
/// estimated stroke width.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineParams {
    /// Horizontal dilation radius that merges the characters of one line.
    pub merge_strokes: usize,
    /// Horizontal erosion per step when an object spans several lines.
    pub erode_strokes: usize,
}

impl Default for LineParams {
    fn default() -> Self {
        Self {
            merge_strokes: 2,
            erode_strokes: 1,
        }
    }
}

pub fn segment_lines(bin: &BinaryImage) -> Vec<Region> {
    segment_lines_with(bin, LineParams::default())
}

/// Extracts text lines top to bottom.
///
/// Components are replaced by their filled hulls and merged with a horizontal
/// dilation. The topmost merged object is cut as one line when its row
/// profile has a single peak; otherwise it is eroded horizontally one step at
/// a time until its topmost piece has a single peak, and that piece, dilated
/// back by the accumulated erosion, is the cut. Every cut removes its pixels
/// from the page, so the emitted masks partition the page foreground.
pub fn segment_lines_with(bin: &BinaryImage, params: LineParams) -> Vec<Region> {
    let Ok(stroke) = estimate_stroke_width(bin) else {
        return Vec::new();
    };
    let smoothing = stroke | 1;
    let merge = (params.merge_strokes * stroke).max(1);
    let erode_step = (params.erode_strokes * stroke).max(1);

    let mut remaining = bin.clone();
    let mut merged = dilate_h(&fill_component_hulls(bin), merge);
    let mut lines = Vec::new();

    while !merged.is_blank() {
        let cs = connected_components(&merged, Connectivity::Eight);
        let top = topmost(&cs);
        let object = cs.mask_of(top, bin.dpi());
        let cut = if single_peak(&object, smoothing) {
            object.clone()
        } else {
            split_top_line(&object, erode_step, smoothing)
        };
        let line = remaining.intersect(&cut);
        remaining = remaining.subtract(&line);
        merged = merged.subtract(&cut);
        let index = vec![lines.len() as u32 + 1];
        if let Some(region) = Region::from_page_mask(&line, Level::Line, index) {
            lines.push(region);
        }
    }
    lines
}

fn topmost(cs: &ComponentSet) -> u32 {
    let (i, _) = cs
        .components()
        .iter()
        .enumerate()
        .min_by_key(|(_, c)| (c.bbox.y0, c.bbox.x0))
        .expect("at least one component");
    i as u32 + 1
}

fn single_peak(object: &BinaryImage, smoothing: usize) -> bool {
    let bbox = object.bounding_box().expect("nonempty object");
    let crop = object.crop(bbox).expect("inside");
    count_peaks(&Profile::horizontal(&crop), smoothing) <= 1
}

fn split_top_line(object: &BinaryImage, step: usize, smoothing: usize) -> BinaryImage {
    let mut radius = step;
    loop {
        let eroded = erode_h(object, radius);
        if eroded.is_blank() {
            // Nothing separates the lines horizontally; take the object whole.
            return object.clone();
        }
        let cs = connected_components(&eroded, Connectivity::Eight);
        let top = topmost(&cs);
        let top_mask = cs.mask_of(top, object.dpi());
        if single_peak(&top_mask, smoothing) {
            // Pieces of the same line that the erosion split apart: every
            // piece whose center row falls inside the top piece's rows.
            let rows = cs.component(top).bbox;
            let mut seed = top_mask;
            for (i, c) in cs.components().iter().enumerate() {
                let center = (c.bbox.y0 + c.bbox.y1) / 2;
                if center >= rows.y0 && center < rows.y1 {
                    for (x, y) in cs.pixels(i as u32 + 1) {
                        seed.set(x, y, true);
                    }
                }
            }
            return dilate_h(&seed, radius).intersect(object);
        }
        radius += step;
    }
}
