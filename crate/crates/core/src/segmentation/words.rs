use super::profile::Profile;
use super::Region;
use crate::corpus::Level;
use crate::imagecore::{connected_components, BinaryImage, Connectivity, Rect};

/// Character counts of consecutive pseudo-words, repeated along the line.
pub const PSEUDO_WORD_CYCLE: [usize; 3] = [2, 3, 4];

/// Splits a line into words at runs of empty columns longer than a third of
/// the line height. Words are indexed left to right below the line's index.
pub fn segment_words(line: &Region) -> Vec<Region> {
    split_words(&line.mask)
        .into_iter()
        .enumerate()
        .filter_map(|(i, (x0, x1))| {
            let mut index = line.index.clone();
            index.push(i as u32 + 1);
            sub_region(line, Rect::new(x0, 0, x1, line.mask.height()), index)
        })
        .collect()
}

/// Column spans `[x0, x1)` of the words of a line mask.
pub fn split_words(mask: &BinaryImage) -> Vec<(usize, usize)> {
    let cols = Profile::vertical(mask).counts;
    let height = mask.height();
    let Some(first) = cols.iter().position(|&c| c > 0) else {
        return Vec::new();
    };
    let last = cols.iter().rposition(|&c| c > 0).unwrap();

    let mut spans = Vec::new();
    let mut start = first;
    let mut x = first;
    while x <= last {
        if cols[x] > 0 {
            x += 1;
            continue;
        }
        let gap_start = x;
        while cols[x] == 0 {
            x += 1;
        }
        // Separator iff gap > height / 3, in exact integer arithmetic.
        if 3 * (x - gap_start) > height {
            spans.push((start, gap_start));
            start = x;
        }
    }
    spans.push((start, last + 1));
    spans
}

/// Group sizes for `n` characters under the repeating cycle, with a smaller
/// trailing group when the characters run out.
pub fn pseudo_word_sizes(n: usize) -> Vec<usize> {
    let mut sizes = Vec::new();
    let mut left = n;
    for &size in PSEUDO_WORD_CYCLE.iter().cycle() {
        if left == 0 {
            break;
        }
        let take = size.min(left);
        sizes.push(take);
        left -= take;
    }
    sizes
}

/// Pseudo-words for scripts written without spaces: connected components
/// ordered by left edge, grouped 2, 3, 4, 2, 3, 4, ...
pub fn pseudo_segment(line: &Region) -> Vec<Region> {
    let cs = connected_components(&line.mask, Connectivity::Eight);
    let mut chars: Vec<u32> = (1..=cs.count() as u32).collect();
    chars.sort_by_key(|&id| {
        let b = cs.component(id).bbox;
        (b.x0, b.y0, id)
    });

    let mut out = Vec::new();
    let mut rest = &chars[..];
    for (i, size) in pseudo_word_sizes(chars.len()).into_iter().enumerate() {
        let (group, tail) = rest.split_at(size);
        rest = tail;
        let bbox = group
            .iter()
            .map(|&id| cs.component(id).bbox)
            .reduce(|a, b| a.union(&b))
            .expect("nonempty group");
        let mut mask = BinaryImage::blank(bbox.width(), bbox.height(), line.mask.dpi())
            .expect("nonempty box");
        for &id in group {
            for (x, y) in cs.pixels(id) {
                mask.set(x - bbox.x0, y - bbox.y0, true);
            }
        }
        let mut index = line.index.clone();
        index.push(i as u32 + 1);
        out.push(Region {
            level: Level::Word,
            bbox: offset(bbox, line.bbox),
            mask,
            index,
        });
    }
    out
}

fn offset(local: Rect, parent: Rect) -> Rect {
    Rect::new(
        local.x0 + parent.x0,
        local.y0 + parent.y0,
        local.x1 + parent.x0,
        local.y1 + parent.y0,
    )
}

/// Tight sub-region of `line` inside the local rectangle `area`.
fn sub_region(line: &Region, area: Rect, index: Vec<u32>) -> Option<Region> {
    let crop = line.mask.crop(area).ok()?;
    let tight = crop.bounding_box()?;
    let local = offset(tight, area);
    Some(Region {
        level: Level::Word,
        bbox: offset(local, line.bbox),
        mask: crop.crop(tight).ok()?,
        index,
    })
}
