use super::components::{connected_components, Connectivity};
use super::raster::BinaryImage;

/// Horizontal dilation with a `1 × (2·radius+1)` structuring element.
pub fn dilate_h(bin: &BinaryImage, radius: usize) -> BinaryImage {
    horizontal_filter(bin, radius, |ones, _len| ones > 0)
}

/// Horizontal erosion with a `1 × (2·radius+1)` structuring element. The
/// window is clipped at the image border, so `erode_h(dilate_h(m, r), r) ⊇ m`.
pub fn erode_h(bin: &BinaryImage, radius: usize) -> BinaryImage {
    horizontal_filter(bin, radius, |ones, len| ones == len)
}

fn horizontal_filter(
    bin: &BinaryImage,
    radius: usize,
    keep: impl Fn(usize, usize) -> bool,
) -> BinaryImage {
    let (w, h) = (bin.width(), bin.height());
    let mut out = vec![false; w * h];
    let mut prefix = vec![0usize; w + 1];
    for y in 0..h {
        for x in 0..w {
            prefix[x + 1] = prefix[x] + bin.get(x, y) as usize;
        }
        for x in 0..w {
            let lo = x.saturating_sub(radius);
            let hi = (x + radius + 1).min(w);
            out[y * w + x] = keep(prefix[hi] - prefix[lo], hi - lo);
        }
    }
    bin.with_mask(out)
}

/// Convex hull of integer points, counter-clockwise in image coordinates
/// (y down), without collinear points. Monotone chain.
pub fn convex_hull(points: &[(usize, usize)]) -> Vec<(i64, i64)> {
    let mut pts: Vec<(i64, i64)> = points.iter().map(|&(x, y)| (x as i64, y as i64)).collect();
    pts.sort_unstable();
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut hull: Vec<(i64, i64)> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &(i64, i64)>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2
                && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0
            {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

#[inline]
fn cross(o: (i64, i64), a: (i64, i64), b: (i64, i64)) -> i64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Sets every pixel whose center lies inside or on the convex hull of
/// `points`. Degenerate hulls (one point, a segment) fill exactly the pixels
/// on them.
pub fn fill_convex_hull(points: &[(usize, usize)], target: &mut BinaryImage) {
    let hull = convex_hull(points);
    if hull.is_empty() {
        return;
    }
    let xs = hull.iter().map(|p| p.0);
    let ys = hull.iter().map(|p| p.1);
    let (x0, x1) = (xs.clone().min().unwrap(), xs.max().unwrap());
    let (y0, y1) = (ys.clone().min().unwrap(), ys.max().unwrap());
    for y in y0..=y1 {
        for x in x0..=x1 {
            let inside = hull.len() == 1
                || (0..hull.len()).all(|i| {
                    let a = hull[i];
                    let b = hull[(i + 1) % hull.len()];
                    cross(a, b, (x, y)) >= 0
                });
            if inside {
                target.set(x as usize, y as usize, true);
            }
        }
    }
}

/// Filled convex hull of a set of pixels, as a mask of the given size.
pub fn convex_hull_mask(
    points: &[(usize, usize)],
    width: usize,
    height: usize,
    dpi: f64,
) -> crate::Result<BinaryImage> {
    let mut out = BinaryImage::blank(width, height, dpi)?;
    fill_convex_hull(points, &mut out);
    Ok(out)
}

/// Replaces every 8-connected component by its filled convex hull.
pub fn fill_component_hulls(bin: &BinaryImage) -> BinaryImage {
    let cs = connected_components(bin, Connectivity::Eight);
    let mut out = bin.with_mask(vec![false; bin.width() * bin.height()]);
    for id in 1..=cs.count() as u32 {
        fill_convex_hull(&cs.pixels(id), &mut out);
    }
    out
}
