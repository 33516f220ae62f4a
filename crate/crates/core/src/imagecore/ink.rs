use super::raster::{BinaryImage, RasterImage};
use crate::error::Result;

/// Full width of the simulated pen nib, in millimetres.
pub const INK_WIDTH_MM: f64 = 0.2;

/// Gaussian standard deviation, in pixels, for the ink-spread model at `dpi`:
/// half of the 0.2 mm full width.
pub fn ink_sigma(dpi: f64) -> f64 {
    INK_WIDTH_MM * dpi / 25.4 / 2.0
}

/// Normalized 1-D Gaussian truncated at 3σ.
pub fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    let radius = (3.0 * sigma).ceil().max(0.0) as usize;
    if sigma <= 0.0 || radius == 0 {
        return vec![1.0];
    }
    let mut k: Vec<f64> = (0..=2 * radius)
        .map(|i| {
            let d = i as f64 - radius as f64;
            (-(d * d) / (2.0 * sigma * sigma)).exp()
        })
        .collect();
    let s: f64 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= s);
    k
}

/// Ink-spread field: the mask convolved with the separable Gaussian, with
/// zero ink outside the image.
pub fn ink_field(bin: &BinaryImage) -> Vec<f64> {
    let (w, h) = (bin.width(), bin.height());
    let k = gaussian_kernel(ink_sigma(bin.dpi()));
    let r = k.len() / 2;
    let src: Vec<f64> = bin.mask().iter().map(|&b| b as u8 as f64).collect();

    let mut tmp = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (i, kv) in k.iter().enumerate() {
                let xx = x as isize + i as isize - r as isize;
                if xx >= 0 && (xx as usize) < w {
                    acc += kv * src[y * w + xx as usize];
                }
            }
            tmp[y * w + x] = acc;
        }
    }
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (i, kv) in k.iter().enumerate() {
                let yy = y as isize + i as isize - r as isize;
                if yy >= 0 && (yy as usize) < h {
                    acc += kv * tmp[yy as usize * w + x];
                }
            }
            out[y * w + x] = acc;
        }
    }
    out
}

/// Simulates fluid ink: Gaussian spread of the ink mask, min-max stretched to
/// `[0, 255]` and inverted so the background is white.
pub fn equalize_ink(bin: &BinaryImage) -> Result<RasterImage> {
    let (w, h) = (bin.width(), bin.height());
    if bin.is_blank() {
        return RasterImage::new(w, h, bin.dpi(), vec![255; w * h]);
    }
    let field = ink_field(bin);
    let (lo, hi) = field
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let span = hi - lo;
    let pixels = field
        .iter()
        .map(|&v| {
            if span <= f64::EPSILON {
                0
            } else {
                (255.0 * (hi - v) / span).round() as u8
            }
        })
        .collect();
    RasterImage::new(w, h, bin.dpi(), pixels)
}
