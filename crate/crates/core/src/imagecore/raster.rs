use crate::error::{Error, Result};

pub const DEFAULT_DPI: f64 = 300.0;

/// Single-channel 8-bit raster, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct RasterImage {
    width: usize,
    height: usize,
    dpi: f64,
    pixels: Vec<u8>,
}

impl RasterImage {
    pub fn new(width: usize, height: usize, dpi: f64, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::EmptyRaster);
        }
        if pixels.len() != width * height {
            return Err(Error::DimensionMismatch {
                expected: width * height,
                actual: pixels.len(),
            });
        }
        check_dpi(dpi)?;
        Ok(Self {
            width,
            height,
            dpi,
            pixels,
        })
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Result<Self> {
        Self::new(width, height, DEFAULT_DPI, vec![value; width * height])
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> u8,
    ) -> Result<Self> {
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        Self::new(width, height, DEFAULT_DPI, pixels)
    }

    pub fn with_dpi(mut self, dpi: f64) -> Result<Self> {
        check_dpi(dpi)?;
        self.dpi = dpi;
        Ok(self)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dpi(&self) -> f64 {
        self.dpi
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: u8) {
        self.pixels[y * self.width + x] = v;
    }

    pub fn crop(&self, rect: Rect) -> Result<RasterImage> {
        let rect = rect.clamp_to(self.width, self.height);
        if rect.is_empty() {
            return Err(Error::EmptyRaster);
        }
        let mut pixels = Vec::with_capacity(rect.area());
        for y in rect.y0..rect.y1 {
            let row = y * self.width;
            pixels.extend_from_slice(&self.pixels[row + rect.x0..row + rect.x1]);
        }
        RasterImage::new(rect.width(), rect.height(), self.dpi, pixels)
    }
}

/// Foreground mask: `true` is ink.
#[derive(Clone, Debug, PartialEq)]
pub struct BinaryImage {
    width: usize,
    height: usize,
    dpi: f64,
    mask: Vec<bool>,
    foreground: usize,
}

impl BinaryImage {
    pub fn new(width: usize, height: usize, dpi: f64, mask: Vec<bool>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::EmptyRaster);
        }
        if mask.len() != width * height {
            return Err(Error::DimensionMismatch {
                expected: width * height,
                actual: mask.len(),
            });
        }
        check_dpi(dpi)?;
        let foreground = mask.iter().filter(|&&b| b).count();
        Ok(Self {
            width,
            height,
            dpi,
            mask,
            foreground,
        })
    }

    pub fn blank(width: usize, height: usize, dpi: f64) -> Result<Self> {
        Self::new(width, height, dpi, vec![false; width * height])
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> bool,
    ) -> Result<Self> {
        let mut mask = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                mask.push(f(x, y));
            }
        }
        Self::new(width, height, DEFAULT_DPI, mask)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dpi(&self) -> f64 {
        self.dpi
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn foreground_count(&self) -> usize {
        self.foreground
    }

    pub fn is_blank(&self) -> bool {
        self.foreground == 0
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.mask[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, v: bool) {
        let i = y * self.width + x;
        if self.mask[i] != v {
            if v {
                self.foreground += 1;
            } else {
                self.foreground -= 1;
            }
            self.mask[i] = v;
        }
    }

    pub(crate) fn with_mask(&self, mask: Vec<bool>) -> BinaryImage {
        debug_assert_eq!(mask.len(), self.mask.len());
        let foreground = mask.iter().filter(|&&b| b).count();
        BinaryImage {
            width: self.width,
            height: self.height,
            dpi: self.dpi,
            mask,
            foreground,
        }
    }

    /// Tight bounding box of the foreground, `None` when blank.
    pub fn bounding_box(&self) -> Option<Rect> {
        if self.is_blank() {
            return None;
        }
        let mut r = Rect {
            x0: usize::MAX,
            y0: usize::MAX,
            x1: 0,
            y1: 0,
        };
        for y in 0..self.height {
            for x in 0..self.width {
                if self.get(x, y) {
                    r.x0 = r.x0.min(x);
                    r.y0 = r.y0.min(y);
                    r.x1 = r.x1.max(x + 1);
                    r.y1 = r.y1.max(y + 1);
                }
            }
        }
        Some(r)
    }

    pub fn crop(&self, rect: Rect) -> Result<BinaryImage> {
        let rect = rect.clamp_to(self.width, self.height);
        if rect.is_empty() {
            return Err(Error::EmptyRaster);
        }
        let mut mask = Vec::with_capacity(rect.area());
        for y in rect.y0..rect.y1 {
            let row = y * self.width;
            mask.extend_from_slice(&self.mask[row + rect.x0..row + rect.x1]);
        }
        BinaryImage::new(rect.width(), rect.height(), self.dpi, mask)
    }

    /// Pixelwise `self && !other`.
    pub fn subtract(&self, other: &BinaryImage) -> BinaryImage {
        let mask = self
            .mask
            .iter()
            .zip(&other.mask)
            .map(|(&a, &b)| a && !b)
            .collect();
        self.with_mask(mask)
    }

    /// Pixelwise `self && other`.
    pub fn intersect(&self, other: &BinaryImage) -> BinaryImage {
        let mask = self
            .mask
            .iter()
            .zip(&other.mask)
            .map(|(&a, &b)| a && b)
            .collect();
        self.with_mask(mask)
    }

    /// Renders ink as 0 and background as 255.
    pub fn to_raster(&self) -> RasterImage {
        let pixels = self.mask.iter().map(|&b| if b { 0 } else { 255 }).collect();
        RasterImage {
            width: self.width,
            height: self.height,
            dpi: self.dpi,
            pixels,
        }
    }
}

/// Half-open pixel rectangle `[x0, x1) × [y0, y1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Rect {
    pub x0: usize,
    pub y0: usize,
    pub x1: usize,
    pub y1: usize,
}

impl Rect {
    pub fn new(x0: usize, y0: usize, x1: usize, y1: usize) -> Self {
        Self { x0, y0, x1, y1 }
    }

    pub fn width(&self) -> usize {
        self.x1.saturating_sub(self.x0)
    }

    pub fn height(&self) -> usize {
        self.y1.saturating_sub(self.y0)
    }

    pub fn area(&self) -> usize {
        self.width() * self.height()
    }

    pub fn is_empty(&self) -> bool {
        self.area() == 0
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        x >= self.x0 && x < self.x1 && y >= self.y0 && y < self.y1
    }

    pub fn union(&self, other: &Rect) -> Rect {
        Rect {
            x0: self.x0.min(other.x0),
            y0: self.y0.min(other.y0),
            x1: self.x1.max(other.x1),
            y1: self.y1.max(other.y1),
        }
    }

    pub fn clamp_to(&self, width: usize, height: usize) -> Rect {
        Rect {
            x0: self.x0.min(width),
            y0: self.y0.min(height),
            x1: self.x1.min(width),
            y1: self.y1.min(height),
        }
    }
}

fn check_dpi(dpi: f64) -> Result<()> {
    if dpi.is_finite() && dpi > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("dpi must be positive, got {dpi}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constructors_validate() {
        assert!(matches!(
            RasterImage::new(0, 4, 300.0, vec![]),
            Err(Error::EmptyRaster)
        ));
        assert!(matches!(
            RasterImage::new(2, 2, 300.0, vec![0; 3]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(RasterImage::new(1, 1, 0.0, vec![0]).is_err());
    }

    #[test]
    fn foreground_count_tracks_mask_edits() {
        let mut b = BinaryImage::blank(4, 3, 300.0).unwrap();
        b.set(1, 1, true);
        b.set(1, 1, true);
        b.set(3, 2, true);
        assert_eq!(b.foreground_count(), 2);
        b.set(1, 1, false);
        assert_eq!(b.foreground_count(), 1);
        assert_eq!(b.bounding_box(), Some(Rect::new(3, 2, 4, 3)));
    }
}
