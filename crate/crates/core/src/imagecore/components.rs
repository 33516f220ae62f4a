use super::raster::{BinaryImage, Rect};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Connectivity {
    Four,
    Eight,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub bbox: Rect,
    pub pixel_count: usize,
}

/// Labeled connected components. Ids are dense `1..=count` in raster order of
/// each component's first pixel; 0 is background.
#[derive(Clone, Debug)]
pub struct ComponentSet {
    width: usize,
    height: usize,
    labels: Vec<u32>,
    components: Vec<Component>,
}

impl ComponentSet {
    pub fn count(&self) -> usize {
        self.components.len()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn label_map(&self) -> &[u32] {
        &self.labels
    }

    pub fn label(&self, x: usize, y: usize) -> u32 {
        self.labels[y * self.width + x]
    }

    /// Component with the given 1-based id.
    pub fn component(&self, id: u32) -> &Component {
        &self.components[id as usize - 1]
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    /// Pixel coordinates of component `id`, in raster order.
    pub fn pixels(&self, id: u32) -> Vec<(usize, usize)> {
        let c = self.component(id);
        let mut out = Vec::with_capacity(c.pixel_count);
        for y in c.bbox.y0..c.bbox.y1 {
            for x in c.bbox.x0..c.bbox.x1 {
                if self.label(x, y) == id {
                    out.push((x, y));
                }
            }
        }
        out
    }

    /// Mask of component `id` in full-image coordinates.
    pub fn mask_of(&self, id: u32, dpi: f64) -> BinaryImage {
        let mask = self.labels.iter().map(|&l| l == id).collect();
        BinaryImage::new(self.width, self.height, dpi, mask).expect("dimensions match")
    }
}

struct DisjointSet {
    parent: Vec<u32>,
}

impl DisjointSet {
    fn find(&mut self, mut i: u32) -> u32 {
        while self.parent[i as usize] != i {
            let p = self.parent[i as usize];
            self.parent[i as usize] = self.parent[p as usize];
            i = p;
        }
        i
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // Keep the smaller provisional label as root.
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi as usize] = lo;
        }
    }
}

pub fn connected_components(bin: &BinaryImage, connectivity: Connectivity) -> ComponentSet {
    let (w, h) = (bin.width(), bin.height());
    let mut labels = vec![0u32; w * h];
    let mut sets = DisjointSet { parent: vec![0] };

    for y in 0..h {
        for x in 0..w {
            if !bin.get(x, y) {
                continue;
            }
            let mut neighbours = [0u32; 4];
            let mut n = 0;
            let mut push = |l: u32| {
                if l != 0 {
                    neighbours[n] = l;
                    n += 1;
                }
            };
            if x > 0 {
                push(labels[y * w + x - 1]);
            }
            if y > 0 {
                push(labels[(y - 1) * w + x]);
                if connectivity == Connectivity::Eight {
                    if x > 0 {
                        push(labels[(y - 1) * w + x - 1]);
                    }
                    if x + 1 < w {
                        push(labels[(y - 1) * w + x + 1]);
                    }
                }
            }
            let label = if n == 0 {
                let l = sets.parent.len() as u32;
                sets.parent.push(l);
                l
            } else {
                let first = neighbours[0];
                for &other in &neighbours[1..n] {
                    sets.union(first, other);
                }
                first
            };
            labels[y * w + x] = label;
        }
    }

    // Second pass: resolve roots and renumber densely in first-pixel order.
    let mut dense = vec![0u32; sets.parent.len()];
    let mut components: Vec<Component> = Vec::new();
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            if labels[i] == 0 {
                continue;
            }
            let root = sets.find(labels[i]);
            if dense[root as usize] == 0 {
                components.push(Component {
                    bbox: Rect::new(x, y, x + 1, y + 1),
                    pixel_count: 0,
                });
                dense[root as usize] = components.len() as u32;
            }
            let id = dense[root as usize];
            labels[i] = id;
            let c = &mut components[id as usize - 1];
            c.pixel_count += 1;
            c.bbox.x0 = c.bbox.x0.min(x);
            c.bbox.x1 = c.bbox.x1.max(x + 1);
            c.bbox.y1 = c.bbox.y1.max(y + 1);
        }
    }

    ComponentSet {
        width: w,
        height: h,
        labels,
        components,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Stack flood fill labeling, used as an independent reference.
    fn flood_fill_labels(bin: &BinaryImage, conn: Connectivity) -> Vec<u32> {
        let (w, h) = (bin.width(), bin.height());
        let mut labels = vec![0u32; w * h];
        let mut next = 0;
        for sy in 0..h {
            for sx in 0..w {
                if !bin.get(sx, sy) || labels[sy * w + sx] != 0 {
                    continue;
                }
                next += 1;
                let mut stack = vec![(sx, sy)];
                labels[sy * w + sx] = next;
                while let Some((x, y)) = stack.pop() {
                    for dy in -1i64..=1 {
                        for dx in -1i64..=1 {
                            if (dx == 0 && dy == 0)
                                || (conn == Connectivity::Four && dx != 0 && dy != 0)
                            {
                                continue;
                            }
                            let (nx, ny) = (x as i64 + dx, y as i64 + dy);
                            if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                                continue;
                            }
                            let (nx, ny) = (nx as usize, ny as usize);
                            if bin.get(nx, ny) && labels[ny * w + nx] == 0 {
                                labels[ny * w + nx] = next;
                                stack.push((nx, ny));
                            }
                        }
                    }
                }
            }
        }
        labels
    }

    #[test]
    fn blank_image_has_no_components() {
        let b = BinaryImage::blank(8, 8, 300.0).unwrap();
        assert_eq!(connected_components(&b, Connectivity::Eight).count(), 0);
    }

    #[test]
    fn two_blocks() {
        let b = BinaryImage::from_fn(12, 6, |x, y| {
            (1..4).contains(&y) && ((1..4).contains(&x) || (7..10).contains(&x))
        })
        .unwrap();
        let cs = connected_components(&b, Connectivity::Four);
        assert_eq!(cs.count(), 2);
        assert_eq!(cs.component(1).bbox, Rect::new(1, 1, 4, 4));
        assert_eq!(cs.component(2).bbox, Rect::new(7, 1, 10, 4));
        assert_eq!(cs.component(1).pixel_count, 9);
    }

    #[test]
    fn diagonal_chain_depends_on_connectivity() {
        let n = 7;
        let b = BinaryImage::from_fn(n, n, |x, y| x == y).unwrap();
        assert_eq!(connected_components(&b, Connectivity::Eight).count(), 1);
        assert_eq!(connected_components(&b, Connectivity::Four).count(), n);
    }

    #[test]
    fn u_shape_merges_provisional_labels() {
        let b = BinaryImage::from_fn(5, 4, |x, y| x == 0 || x == 4 || y == 3).unwrap();
        let cs = connected_components(&b, Connectivity::Four);
        assert_eq!(cs.count(), 1);
        assert_eq!(cs.component(1).pixel_count, 4 + 4 + 3);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn agrees_with_flood_fill(bits in proptest::collection::vec(any::<bool>(), 32 * 32), eight in any::<bool>()) {
            let b = BinaryImage::new(32, 32, 300.0, bits).unwrap();
            let conn = if eight { Connectivity::Eight } else { Connectivity::Four };
            let cs = connected_components(&b, conn);
            let oracle = flood_fill_labels(&b, conn);
            // Both number components in first-pixel raster order, so the
            // partitions agree exactly when the label maps are equal.
            prop_assert_eq!(cs.label_map(), &oracle[..]);
            for (i, c) in cs.components().iter().enumerate() {
                let id = i as u32 + 1;
                let pixels: Vec<_> = (0..32 * 32).filter(|&p| oracle[p] == id).collect();
                prop_assert_eq!(c.pixel_count, pixels.len());
                for p in pixels {
                    prop_assert!(c.bbox.contains(p % 32, p / 32));
                }
            }
        }
    }
}
