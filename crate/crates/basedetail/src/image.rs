//! Single-channel raster images and boolean masks.
//!
//! `Image` is the currency of every filter and measure in this crate: a
//! row-major buffer of `f64` samples with a nominal dynamic of `[0, 1]`.
//! Values outside `[0, 1]` are legal — detail layers and intermediates go
//! negative all the time — but non-finite samples are rejected at every
//! construction point so NaNs cannot propagate silently into a score.

use crate::error::{Error, Result};

/// A grayscale image. Samples are stored row-major, `samples[y * width + x]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    width: usize,
    height: usize,
    samples: Vec<f64>,
}

impl Image {
    /// All-zero image.
    pub fn zeros(width: usize, height: usize) -> Image {
        assert!(width >= 1 && height >= 1, "image dimensions must be >= 1");
        Image {
            width,
            height,
            samples: vec![0.0; width * height],
        }
    }

    /// Image filled with a constant value.
    pub fn constant(width: usize, height: usize, value: f64) -> Image {
        assert!(value.is_finite());
        let mut img = Image::zeros(width, height);
        img.samples.fill(value);
        img
    }

    /// Builds an image by evaluating `f(x, y)` at every pixel.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Image {
        let mut img = Image::zeros(width, height);
        for y in 0..height {
            for x in 0..width {
                img.samples[y * width + x] = f(x, y);
            }
        }
        debug_assert!(img.samples.iter().all(|v| v.is_finite()));
        img
    }

    /// Wraps a raw sample buffer. Fails if the length does not match the
    /// dimensions or any sample is non-finite.
    pub fn from_vec(width: usize, height: usize, samples: Vec<f64>) -> Result<Image> {
        if width == 0 || height == 0 {
            return Err(Error::Parameter("image dimensions must be >= 1".into()));
        }
        if samples.len() != width * height {
            return Err(Error::Parameter(format!(
                "sample buffer has {} entries, expected {}",
                samples.len(),
                width * height
            )));
        }
        if !samples.iter().all(|v| v.is_finite()) {
            return Err(Error::Parameter("non-finite sample in image buffer".into()));
        }
        Ok(Image {
            width,
            height,
            samples,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        false // width, height >= 1 by construction
    }

    pub fn same_size(&self, other: &Image) -> bool {
        self.width == other.width && self.height == other.height
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize) -> f64 {
        debug_assert!(x < self.width && y < self.height);
        self.samples[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: f64) {
        debug_assert!(x < self.width && y < self.height);
        self.samples[y * self.width + x] = value;
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [f64] {
        &mut self.samples
    }

    /// One row as a slice.
    pub fn row(&self, y: usize) -> &[f64] {
        &self.samples[y * self.width..(y + 1) * self.width]
    }

    /// Pointwise map into a new image.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Image {
        Image {
            width: self.width,
            height: self.height,
            samples: self.samples.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Pointwise combination of two same-sized images.
    pub fn zip_map(&self, other: &Image, f: impl Fn(f64, f64) -> f64) -> Image {
        assert!(self.same_size(other), "image size mismatch");
        Image {
            width: self.width,
            height: self.height,
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    /// `self - other`, the detail layer when `other` is a base layer.
    pub fn sub(&self, other: &Image) -> Image {
        self.zip_map(other, |a, b| a - b)
    }

    /// `self + other`.
    pub fn add(&self, other: &Image) -> Image {
        self.zip_map(other, |a, b| a + b)
    }

    /// Mean over all samples.
    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.samples.len() as f64
    }

    /// Largest absolute difference against another image of the same size.
    pub fn max_abs_diff(&self, other: &Image) -> f64 {
        assert!(self.same_size(other), "image size mismatch");
        self.samples
            .iter()
            .zip(&other.samples)
            .map(|(&a, &b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn min_max(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &v in &self.samples {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        (lo, hi)
    }
}

/// Forward-difference gradients: `gx(x,y) = u(x+1,y) - u(x,y)` with a zero
/// last column, and the transposed analogue for `gy`.
pub fn gradients(img: &Image) -> (Image, Image) {
    let (w, h) = (img.width(), img.height());
    let mut gx = Image::zeros(w, h);
    let mut gy = Image::zeros(w, h);
    for y in 0..h {
        for x in 0..w - 1 {
            gx.set(x, y, img.at(x + 1, y) - img.at(x, y));
        }
    }
    for y in 0..h - 1 {
        for x in 0..w {
            gy.set(x, y, img.at(x, y + 1) - img.at(x, y));
        }
    }
    (gx, gy)
}

/// Clamp floor used by [`log_luminance`] so zero-valued pixels stay finite.
pub const LOG_LUMINANCE_FLOOR: f64 = 1.0 / 256.0;

/// Natural log of the luminance, `ln(max(u, 1/256))`.
pub fn log_luminance(img: &Image) -> Image {
    img.map(|v| v.max(LOG_LUMINANCE_FLOOR).ln())
}

/// Detail-layer peak signal-to-noise ratio in decibels:
///
/// `-10 * log10( ||input - base||_2 / sqrt(N) )`
///
/// i.e. minus ten times the log of the root-mean-square of the detail layer.
/// Identical images give `+inf`, the "no detail" sentinel.
pub fn psnr_detail(input: &Image, base: &Image) -> Result<f64> {
    if !input.same_size(base) {
        return Err(Error::Parameter("psnr_detail: size mismatch".into()));
    }
    let n = input.len() as f64;
    let sq_sum: f64 = input
        .samples()
        .iter()
        .zip(base.samples())
        .map(|(&a, &b)| (a - b) * (a - b))
        .sum();
    let rms = (sq_sum / n).sqrt();
    Ok(-10.0 * rms.log10())
}

/// A boolean pixel mask with the same geometry conventions as [`Image`].
#[derive(Debug, Clone, PartialEq)]
pub struct Mask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl Mask {
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Mask {
        assert!(width >= 1 && height >= 1);
        let mut bits = vec![false; width * height];
        for y in 0..height {
            for x in 0..width {
                bits[y * width + x] = f(x, y);
            }
        }
        Mask {
            width,
            height,
            bits,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Number of set pixels.
    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn matches(&self, img: &Image) -> bool {
        self.width == img.width() && self.height == img.height()
    }

    /// True if no pixel is shared with `other`.
    pub fn disjoint(&self, other: &Mask) -> bool {
        self.bits
            .iter()
            .zip(&other.bits)
            .all(|(&a, &b)| !(a && b))
    }
}

/// Population variance (divide by the count, not count minus one) of the
/// samples selected by `mask`. Needs at least two selected pixels.
pub fn variance_masked(img: &Image, mask: &Mask) -> Result<f64> {
    if !mask.matches(img) {
        return Err(Error::Parameter("variance_masked: size mismatch".into()));
    }
    let mut count = 0usize;
    let mut sum = 0.0;
    for (&v, &m) in img.samples().iter().zip(mask.bits()) {
        if m {
            count += 1;
            sum += v;
        }
    }
    if count < 2 {
        return Err(Error::Parameter(format!(
            "variance_masked: mask selects {count} pixels, need at least 2"
        )));
    }
    let mean = sum / count as f64;
    let mut sq = 0.0;
    for (&v, &m) in img.samples().iter().zip(mask.bits()) {
        if m {
            sq += (v - mean) * (v - mean);
        }
    }
    Ok(sq / count as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_vec_rejects_bad_buffers() {
        assert!(Image::from_vec(2, 2, vec![0.0; 3]).is_err());
        assert!(Image::from_vec(2, 2, vec![0.0, 1.0, f64::NAN, 0.5]).is_err());
        assert!(Image::from_vec(0, 2, vec![]).is_err());
        assert!(Image::from_vec(2, 2, vec![0.0; 4]).is_ok());
    }

    #[test]
    fn gradients_constant_is_zero() {
        let img = Image::constant(7, 5, 0.3);
        let (gx, gy) = gradients(&img);
        assert!(gx.samples().iter().all(|&v| v == 0.0));
        assert!(gy.samples().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn gradients_ramp() {
        let s = 0.05;
        let img = Image::from_fn(8, 4, |x, _| s * x as f64);
        let (gx, gy) = gradients(&img);
        for y in 0..4 {
            for x in 0..8 {
                let expect = if x == 7 { 0.0 } else { s };
                assert!((gx.at(x, y) - expect).abs() < 1e-14);
                assert_eq!(gy.at(x, y), 0.0);
            }
        }
    }

    #[test]
    fn gradients_match_direct_loop() {
        let img = Image::from_fn(8, 8, |x, y| ((x * 31 + y * 17) % 13) as f64 / 13.0);
        let (gx, gy) = gradients(&img);
        for y in 0..8 {
            for x in 0..8 {
                let ex = if x + 1 < 8 {
                    img.at(x + 1, y) - img.at(x, y)
                } else {
                    0.0
                };
                let ey = if y + 1 < 8 {
                    img.at(x, y + 1) - img.at(x, y)
                } else {
                    0.0
                };
                assert_eq!(gx.at(x, y), ex);
                assert_eq!(gy.at(x, y), ey);
            }
        }
    }

    #[test]
    fn log_luminance_values() {
        let ones = Image::constant(4, 4, 1.0);
        assert!(log_luminance(&ones).samples().iter().all(|&v| v == 0.0));

        let zeros = Image::zeros(4, 4);
        let expect = LOG_LUMINANCE_FLOOR.ln();
        assert!(log_luminance(&zeros)
            .samples()
            .iter()
            .all(|&v| (v - expect).abs() < 1e-15));

        // A region at e/256 sits exactly one log unit above the clamp floor.
        let e_over = Image::constant(4, 4, std::f64::consts::E / 256.0);
        let diff = log_luminance(&e_over).at(0, 0) - expect;
        assert!((diff - 1.0).abs() < 1e-12);
    }

    #[test]
    fn psnr_detail_cases() {
        let a = Image::constant(10, 10, 0.5);
        // Identical images: the +inf "no detail" sentinel.
        assert_eq!(psnr_detail(&a, &a).unwrap(), f64::INFINITY);

        // Uniform detail of 0.1 has RMS 0.1, hence exactly 10 dB.
        let b = a.map(|v| v - 0.1);
        assert!((psnr_detail(&a, &b).unwrap() - 10.0).abs() < 1e-12);

        // The calibration target 16.23 dB corresponds to RMS 10^(-1.623).
        let rms = 10f64.powf(-1.623);
        let c = a.map(|v| v - rms);
        assert!((psnr_detail(&a, &c).unwrap() - 16.23).abs() < 1e-10);

        let wrong = Image::zeros(9, 10);
        assert!(psnr_detail(&a, &wrong).is_err());
    }

    #[test]
    fn psnr_detail_decreasing_in_magnitude() {
        let base = Image::zeros(16, 16);
        let mut last = f64::INFINITY;
        for k in 1..=10 {
            let mag = 0.01 * k as f64;
            let input = Image::constant(16, 16, mag);
            let db = psnr_detail(&input, &base).unwrap();
            assert!(db < last, "psnr must strictly decrease with detail");
            last = db;
        }
    }

    #[test]
    fn variance_masked_cases() {
        let img = Image::from_fn(4, 1, |x, _| [0.0, 1.0, 7.0, 7.0][x]);
        let both = Mask::from_fn(4, 1, |x, _| x < 2);
        // Two samples {0, 1}: population variance 0.25.
        assert!((variance_masked(&img, &both).unwrap() - 0.25).abs() < 1e-15);

        let constant = Mask::from_fn(4, 1, |x, _| x >= 2);
        assert_eq!(variance_masked(&img, &constant).unwrap(), 0.0);

        let single = Mask::from_fn(4, 1, |x, _| x == 0);
        assert!(variance_masked(&img, &single).is_err());
    }

    #[test]
    fn variance_masked_matches_loop_oracle() {
        // Deterministic pseudo-random image and mask.
        let img = Image::from_fn(16, 16, |x, y| (((x * 131 + y * 313) % 97) as f64) / 96.0);
        let mask = Mask::from_fn(16, 16, |x, y| (x * 7 + y * 11) % 3 != 0);
        let got = variance_masked(&img, &mask).unwrap();

        let mut vals = Vec::new();
        for y in 0..16 {
            for x in 0..16 {
                if mask.at(x, y) {
                    vals.push(img.at(x, y));
                }
            }
        }
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / vals.len() as f64;
        assert!((got - var).abs() < 1e-12);
    }
}
