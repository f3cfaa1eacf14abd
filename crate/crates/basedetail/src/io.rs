//! Reading and writing images.
//!
//! Input: 8- or 16-bit grayscale PGM (P2 or P5) and PNG; color PNGs are
//! reduced to one channel by averaging. Samples are scaled to `[0, 1]` by
//! the format's maximum value. Output is always 16 bits so quantization
//! error (at most 1/65535) stays far below every measure tolerance.

use crate::error::{Error, Result};
use crate::image::{Image, Mask};
use image::{DynamicImage, ImageBuffer, Luma};
use std::fs;
use std::io::Write;
use std::path::Path;

/// Loads a PGM or PNG file, scaling samples to `[0, 1]`.
pub fn load_image(path: impl AsRef<Path>) -> Result<Image> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.starts_with(b"P2") || bytes.starts_with(b"P5") {
        decode_pgm(&bytes)
    } else {
        decode_png(&bytes)
    }
}

fn decode_png(bytes: &[u8]) -> Result<Image> {
    let dynimg = image::load_from_memory(bytes).map_err(|e| Error::Format(e.to_string()))?;
    let (w, h) = (dynimg.width() as usize, dynimg.height() as usize);
    let samples = match dynimg {
        DynamicImage::ImageLuma8(buf) => {
            buf.pixels().map(|p| p.0[0] as f64 / 255.0).collect()
        }
        DynamicImage::ImageLuma16(buf) => {
            buf.pixels().map(|p| p.0[0] as f64 / 65535.0).collect()
        }
        DynamicImage::ImageRgb8(buf) => buf
            .pixels()
            .map(|p| (p.0[0] as f64 + p.0[1] as f64 + p.0[2] as f64) / (3.0 * 255.0))
            .collect(),
        DynamicImage::ImageRgb16(buf) => buf
            .pixels()
            .map(|p| (p.0[0] as f64 + p.0[1] as f64 + p.0[2] as f64) / (3.0 * 65535.0))
            .collect(),
        DynamicImage::ImageLumaA8(buf) => {
            buf.pixels().map(|p| p.0[0] as f64 / 255.0).collect()
        }
        DynamicImage::ImageLumaA16(buf) => {
            buf.pixels().map(|p| p.0[0] as f64 / 65535.0).collect()
        }
        DynamicImage::ImageRgba8(buf) => buf
            .pixels()
            .map(|p| (p.0[0] as f64 + p.0[1] as f64 + p.0[2] as f64) / (3.0 * 255.0))
            .collect(),
        DynamicImage::ImageRgba16(buf) => buf
            .pixels()
            .map(|p| (p.0[0] as f64 + p.0[1] as f64 + p.0[2] as f64) / (3.0 * 65535.0))
            .collect(),
        other => {
            return Err(Error::Format(format!(
                "unsupported pixel layout {:?}",
                other.color()
            )))
        }
    };
    Image::from_vec(w, h, samples)
}

/// Parses P2 (ascii) and P5 (binary) PGM with any maxval up to 65535.
fn decode_pgm(bytes: &[u8]) -> Result<Image> {
    let mut cursor = 2usize; // past the magic
    let binary = bytes.starts_with(b"P5");

    let mut header = Vec::with_capacity(3);
    while header.len() < 3 {
        skip_pgm_whitespace(bytes, &mut cursor)?;
        let start = cursor;
        while cursor < bytes.len() && bytes[cursor].is_ascii_digit() {
            cursor += 1;
        }
        if cursor == start {
            return Err(Error::Format("malformed PGM header".into()));
        }
        let text = std::str::from_utf8(&bytes[start..cursor]).unwrap();
        header.push(
            text.parse::<usize>()
                .map_err(|_| Error::Format("bad PGM header number".into()))?,
        );
    }
    let (w, h, maxval) = (header[0], header[1], header[2]);
    if maxval == 0 || maxval > 65535 {
        return Err(Error::Format(format!("unsupported PGM maxval {maxval}")));
    }
    let scale = maxval as f64;

    let samples = if binary {
        // Exactly one whitespace byte separates the header from the raster.
        cursor += 1;
        let mut out = Vec::with_capacity(w * h);
        if maxval < 256 {
            let raster = bytes
                .get(cursor..cursor + w * h)
                .ok_or_else(|| Error::Format("truncated PGM raster".into()))?;
            out.extend(raster.iter().map(|&b| b as f64 / scale));
        } else {
            let raster = bytes
                .get(cursor..cursor + 2 * w * h)
                .ok_or_else(|| Error::Format("truncated PGM raster".into()))?;
            out.extend(
                raster
                    .chunks_exact(2)
                    .map(|c| u16::from_be_bytes([c[0], c[1]]) as f64 / scale),
            );
        }
        out
    } else {
        let mut out = Vec::with_capacity(w * h);
        for _ in 0..w * h {
            skip_pgm_whitespace(bytes, &mut cursor)?;
            let start = cursor;
            while cursor < bytes.len() && bytes[cursor].is_ascii_digit() {
                cursor += 1;
            }
            if cursor == start {
                return Err(Error::Format("truncated PGM raster".into()));
            }
            let v: usize = std::str::from_utf8(&bytes[start..cursor])
                .unwrap()
                .parse()
                .map_err(|_| Error::Format("bad PGM sample".into()))?;
            out.push(v as f64 / scale);
        }
        out
    };
    Image::from_vec(w, h, samples)
}

fn skip_pgm_whitespace(bytes: &[u8], cursor: &mut usize) -> Result<()> {
    loop {
        match bytes.get(*cursor) {
            Some(b) if b.is_ascii_whitespace() => *cursor += 1,
            Some(b'#') => {
                while *cursor < bytes.len() && bytes[*cursor] != b'\n' {
                    *cursor += 1;
                }
            }
            Some(_) => return Ok(()),
            None => return Err(Error::Format("unexpected end of PGM header".into())),
        }
    }
}

fn quantize16(v: f64) -> u16 {
    (v.clamp(0.0, 1.0) * 65535.0).round() as u16
}

/// Writes a 16-bit PGM (`.pgm`) or PNG (anything else), clamping samples to
/// `[0, 1]` and rounding to `x * 65535`.
pub fn save_image(img: &Image, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let is_pgm = path
        .extension()
        .map(|e| e.eq_ignore_ascii_case("pgm"))
        .unwrap_or(false);
    if is_pgm {
        let mut data = Vec::with_capacity(32 + 2 * img.len());
        write!(data, "P5\n{} {}\n65535\n", img.width(), img.height()).unwrap();
        for &v in img.samples() {
            data.extend_from_slice(&quantize16(v).to_be_bytes());
        }
        fs::write(path, data).map_err(|e| Error::io(path, e))
    } else {
        let buf: ImageBuffer<Luma<u16>, Vec<u16>> = ImageBuffer::from_fn(
            img.width() as u32,
            img.height() as u32,
            |x, y| Luma([quantize16(img.at(x as usize, y as usize))]),
        );
        buf.save(path)
            .map_err(|e| Error::Format(format!("{}: {e}", path.display())))
    }
}

/// Writes a mask as an 8-bit PNG/PGM with values 0 and 255.
pub fn save_mask(mask: &Mask, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let is_pgm = path
        .extension()
        .map(|e| e.eq_ignore_ascii_case("pgm"))
        .unwrap_or(false);
    if is_pgm {
        let mut data = Vec::with_capacity(32 + mask.bits().len());
        write!(data, "P5\n{} {}\n255\n", mask.width(), mask.height()).unwrap();
        data.extend(mask.bits().iter().map(|&b| if b { 255u8 } else { 0 }));
        fs::write(path, data).map_err(|e| Error::io(path, e))
    } else {
        let buf: ImageBuffer<Luma<u8>, Vec<u8>> =
            ImageBuffer::from_fn(mask.width() as u32, mask.height() as u32, |x, y| {
                Luma([if mask.at(x as usize, y as usize) { 255 } else { 0 }])
            });
        buf.save(path)
            .map_err(|e| Error::Format(format!("{}: {e}", path.display())))
    }
}
