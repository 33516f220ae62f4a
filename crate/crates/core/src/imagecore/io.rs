//! PNG reading and writing. Color inputs are converted to luma on load; the
//! physical-dimensions chunk carries dpi in both directions.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use png::{BitDepth, ColorType, PixelDimensions, Transformations, Unit};

use super::raster::{RasterImage, DEFAULT_DPI};
use crate::error::{Error, Result};

const METERS_PER_INCH: f64 = 0.0254;

/// Decodes a PNG. Returns the raster and the dpi found in the file, if any;
/// the raster carries `fallback_dpi` when the file has none.
pub fn read_png(path: &Path, fallback_dpi: Option<f64>) -> Result<RasterImage> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    decode_png(BufReader::new(file), fallback_dpi).map_err(|e| match e {
        DecodeFailure::Png(source) => Error::PngDecode {
            path: path.to_path_buf(),
            source,
        },
        DecodeFailure::Other(e) => e,
    })
}

enum DecodeFailure {
    Png(png::DecodingError),
    Other(Error),
}

fn decode_png<R: std::io::BufRead + std::io::Seek>(
    reader: R,
    fallback_dpi: Option<f64>,
) -> std::result::Result<RasterImage, DecodeFailure> {
    let mut decoder = png::Decoder::new(reader);
    decoder.set_transformations(Transformations::EXPAND | Transformations::STRIP_16);
    let mut reader = decoder.read_info().map_err(DecodeFailure::Png)?;
    let file_dpi = reader.info().pixel_dims.and_then(|d| match d.unit {
        Unit::Meter if d.xppu > 0 => Some(d.xppu as f64 * METERS_PER_INCH),
        _ => None,
    });
    let size = reader
        .output_buffer_size()
        .ok_or(DecodeFailure::Other(Error::EmptyRaster))?;
    let mut buf = vec![0u8; size];
    let frame = reader.next_frame(&mut buf).map_err(DecodeFailure::Png)?;
    let (w, h) = (frame.width as usize, frame.height as usize);
    let channels = frame.color_type.samples();
    let stride = frame.line_size;
    let mut pixels = Vec::with_capacity(w * h);
    for y in 0..h {
        let row = &buf[y * stride..y * stride + w * channels];
        for px in row.chunks_exact(channels) {
            let v = match frame.color_type {
                ColorType::Grayscale | ColorType::GrayscaleAlpha => px[0],
                _ => luma(px[0], px[1], px[2]),
            };
            pixels.push(v);
        }
    }
    let dpi = file_dpi.or(fallback_dpi).unwrap_or(DEFAULT_DPI);
    RasterImage::new(w, h, dpi, pixels).map_err(DecodeFailure::Other)
}

/// ITU-R BT.601 luma.
pub fn luma(r: u8, g: u8, b: u8) -> u8 {
    (0.299 * r as f64 + 0.587 * g as f64 + 0.114 * b as f64).round() as u8
}

/// Encodes an 8-bit grayscale PNG with a physical-dimensions chunk.
pub fn write_png(path: &Path, img: &RasterImage) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    encode_png(&mut out, img).map_err(|source| Error::PngEncode {
        path: path.to_path_buf(),
        source,
    })?;
    out.flush().map_err(|e| Error::io(path, e))
}

pub fn encode_png<W: Write>(out: W, img: &RasterImage) -> std::result::Result<(), png::EncodingError> {
    let mut encoder = png::Encoder::new(out, img.width() as u32, img.height() as u32);
    encoder.set_color(ColorType::Grayscale);
    encoder.set_depth(BitDepth::Eight);
    let ppm = (img.dpi() / METERS_PER_INCH).round() as u32;
    encoder.set_pixel_dims(Some(PixelDimensions {
        xppu: ppm,
        yppu: ppm,
        unit: Unit::Meter,
    }));
    let mut writer = encoder.write_header()?;
    writer.write_image_data(img.pixels())?;
    writer.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_keeps_pixels_and_dpi() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.png");
        let img = RasterImage::from_fn(7, 5, |x, y| (x * 30 + y) as u8)
            .unwrap()
            .with_dpi(200.0)
            .unwrap();
        write_png(&path, &img).unwrap();
        let back = read_png(&path, None).unwrap();
        assert_eq!(back.pixels(), img.pixels());
        assert!((back.dpi() - 200.0).abs() < 0.1);
    }

    #[test]
    fn rgb_is_luma_converted_and_dpi_falls_back() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rgb.png");
        {
            let f = File::create(&path).unwrap();
            let mut enc = png::Encoder::new(BufWriter::new(f), 2, 1);
            enc.set_color(ColorType::Rgb);
            enc.set_depth(BitDepth::Eight);
            let mut w = enc.write_header().unwrap();
            w.write_image_data(&[255, 0, 0, 10, 20, 30]).unwrap();
        }
        let img = read_png(&path, Some(150.0)).unwrap();
        assert_eq!(img.pixels(), &[luma(255, 0, 0), luma(10, 20, 30)]);
        assert_eq!(img.pixels()[0], 76);
        assert_eq!(img.dpi(), 150.0);
        assert_eq!(read_png(&path, None).unwrap().dpi(), DEFAULT_DPI);
    }
}
