//! Linear smoothing primitives: separable Gaussian, spectral Gaussian and
//! the border-aware box mean.
//!
//! Every operator here extends the image by half-sample symmetry (mirror
//! without repeating the border pixel), so a constant image stays constant
//! and no spurious edge is created at the frame — spurious edges would leak
//! straight into the artifact scores downstream.

use crate::error::{Error, Result};
use crate::image::Image;
use rustfft::{num_complex::Complex, FftPlanner};

/// Half-sample symmetric index: maps any `i` (possibly negative) into
/// `[0, n)` by mirroring with period `2n`.
#[inline]
pub(crate) fn mirror_index(i: isize, n: usize) -> usize {
    let n = n as isize;
    let period = 2 * n;
    let mut m = i % period;
    if m < 0 {
        m += period;
    }
    if m < n {
        m as usize
    } else {
        (period - 1 - m) as usize
    }
}

/// Sampled Gaussian kernel of standard deviation `sigma`, truncated at
/// radius `ceil(3 sigma)` and renormalized to sum 1.
pub(crate) fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    assert!(sigma > 0.0);
    let radius = (3.0 * sigma).ceil() as usize;
    let mut k = Vec::with_capacity(2 * radius + 1);
    for j in -(radius as isize)..=(radius as isize) {
        let t = j as f64 / sigma;
        k.push((-0.5 * t * t).exp());
    }
    let sum: f64 = k.iter().sum();
    for v in &mut k {
        *v /= sum;
    }
    k
}

fn convolve_rows(img: &Image, kernel: &[f64]) -> Image {
    let (w, h) = (img.width(), img.height());
    let radius = kernel.len() / 2;
    let mut out = Image::zeros(w, h);
    for y in 0..h {
        let row = img.row(y);
        for x in 0..w {
            let mut acc = 0.0;
            for (j, &kv) in kernel.iter().enumerate() {
                let xi = mirror_index(x as isize + j as isize - radius as isize, w);
                acc += kv * row[xi];
            }
            out.set(x, y, acc);
        }
    }
    out
}

fn transpose(img: &Image) -> Image {
    let (w, h) = (img.width(), img.height());
    Image::from_fn(h, w, |x, y| img.at(y, x))
}

/// Separable Gaussian blur in the spatial domain. `sigma = 0` is the
/// identity.
pub fn gaussian_blur_spatial(img: &Image, sigma: f64) -> Result<Image> {
    if sigma < 0.0 || !sigma.is_finite() {
        return Err(Error::Parameter(format!(
            "gaussian_blur_spatial: sigma must be >= 0, got {sigma}"
        )));
    }
    if sigma == 0.0 {
        return Ok(img.clone());
    }
    let kernel = gaussian_kernel(sigma);
    let rows = convolve_rows(img, &kernel);
    Ok(transpose(&convolve_rows(&transpose(&rows), &kernel)))
}

/// Gaussian blur computed in the Fourier domain: the spectrum is multiplied
/// by `exp(-2 pi^2 sigma^2 xi^2)` per axis. Each row/column is mirrored to
/// twice its length before the transform, which realizes the half-sample
/// symmetric boundary exactly.
pub fn gaussian_blur_fourier(img: &Image, sigma: f64) -> Result<Image> {
    if sigma <= 0.0 || !sigma.is_finite() {
        return Err(Error::Parameter(format!(
            "gaussian_blur_fourier: sigma must be > 0, got {sigma}"
        )));
    }
    let rows = fourier_blur_rows(img, sigma);
    Ok(transpose(&fourier_blur_rows(&transpose(&rows), sigma)))
}

fn fourier_blur_rows(img: &Image, sigma: f64) -> Image {
    let (w, h) = (img.width(), img.height());
    let n = 2 * w;
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);

    // Transfer function at the discrete frequencies of the doubled signal.
    let transfer: Vec<f64> = (0..n)
        .map(|k| {
            let f = k.min(n - k) as f64 / n as f64;
            (-2.0 * std::f64::consts::PI.powi(2) * sigma * sigma * f * f).exp()
        })
        .collect();

    let mut out = Image::zeros(w, h);
    let mut buf = vec![Complex::new(0.0, 0.0); n];
    for y in 0..h {
        let row = img.row(y);
        for x in 0..w {
            buf[x] = Complex::new(row[x], 0.0);
            buf[n - 1 - x] = Complex::new(row[x], 0.0);
        }
        fwd.process(&mut buf);
        for (c, &t) in buf.iter_mut().zip(&transfer) {
            *c *= t;
        }
        inv.process(&mut buf);
        let scale = 1.0 / n as f64;
        for x in 0..w {
            out.set(x, y, buf[x].re * scale);
        }
    }
    out
}

/// Mean over the `(2r+1) x (2r+1)` square window intersected with the image
/// domain, computed in O(1) per pixel with an integral image.
pub fn box_mean(img: &Image, radius: usize) -> Image {
    if radius == 0 {
        return img.clone();
    }
    let (w, h) = (img.width(), img.height());
    // integral[y][x] = sum of samples in [0,x) x [0,y)
    let iw = w + 1;
    let mut integral = vec![0.0f64; iw * (h + 1)];
    for y in 0..h {
        let mut row_sum = 0.0;
        for x in 0..w {
            row_sum += img.at(x, y);
            integral[(y + 1) * iw + (x + 1)] = integral[y * iw + (x + 1)] + row_sum;
        }
    }
    Image::from_fn(w, h, |x, y| {
        let x0 = x.saturating_sub(radius);
        let x1 = (x + radius + 1).min(w);
        let y0 = y.saturating_sub(radius);
        let y1 = (y + radius + 1).min(h);
        let sum = integral[y1 * iw + x1] - integral[y0 * iw + x1] - integral[y1 * iw + x0]
            + integral[y0 * iw + x0];
        sum / ((x1 - x0) * (y1 - y0)) as f64
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn random_image(w: usize, h: usize, seed: u64) -> Image {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        Image::from_fn(w, h, |_, _| rng.gen::<f64>())
    }

    #[test]
    fn mirror_index_period() {
        // n = 4 -> extension ... 1 0 | 0 1 2 3 | 3 2 ...
        assert_eq!(mirror_index(-1, 4), 0);
        assert_eq!(mirror_index(-2, 4), 1);
        assert_eq!(mirror_index(4, 4), 3);
        assert_eq!(mirror_index(5, 4), 2);
        assert_eq!(mirror_index(8, 4), 0);
    }

    #[test]
    fn spatial_blur_identity_and_constants() {
        let img = random_image(16, 12, 1);
        let out = gaussian_blur_spatial(&img, 0.0).unwrap();
        assert_eq!(img, out);

        let c = Image::constant(16, 16, 0.42);
        for sigma in [0.5, 1.0, 3.0] {
            let out = gaussian_blur_spatial(&c, sigma).unwrap();
            assert!(c.max_abs_diff(&out) < 1e-12, "mass must be preserved");
        }
        assert!(gaussian_blur_spatial(&img, -1.0).is_err());
    }

    #[test]
    fn spatial_blur_fixes_ramps_in_the_interior() {
        // Linear functions are fixed points of symmetric normalized kernels
        // away from the borders.
        let img = Image::from_fn(32, 4, |x, _| 0.02 * x as f64);
        let out = gaussian_blur_spatial(&img, 1.0).unwrap();
        let naive = {
            let k = gaussian_kernel(1.0);
            let r = k.len() / 2;
            Image::from_fn(32, 4, |x, y| {
                let mut acc = 0.0;
                for (j, &kv) in k.iter().enumerate() {
                    acc += kv * img.at(mirror_index(x as isize + j as isize - r as isize, 32), y);
                }
                acc
            })
        };
        assert!(out.max_abs_diff(&naive) < 1e-12);
        for x in 4..28 {
            assert!((out.at(x, 2) - img.at(x, 2)).abs() < 1e-12);
        }
    }

    #[test]
    fn fourier_blur_constant_and_near_identity() {
        let c = Image::constant(20, 14, 0.77);
        let out = gaussian_blur_fourier(&c, 3.0).unwrap();
        assert!(c.max_abs_diff(&out) < 1e-12);

        let img = random_image(24, 24, 2);
        let out = gaussian_blur_fourier(&img, 0.01).unwrap();
        assert!(img.max_abs_diff(&out) < 1e-4);

        assert!(gaussian_blur_fourier(&img, 0.0).is_err());
    }

    #[test]
    fn fourier_blur_impulse_matches_sampled_gaussian() {
        let mut img = Image::zeros(64, 64);
        img.set(32, 32, 1.0);
        let sigma = 2.0;
        let out = gaussian_blur_fourier(&img, sigma).unwrap();

        // Spatial-domain oracle: separable sampled Gaussian, normalized.
        let mut k: Vec<f64> = (-32..32)
            .map(|j| (-0.5 * (j as f64 / sigma).powi(2)).exp())
            .collect();
        let sum: f64 = k.iter().sum();
        for v in &mut k {
            *v /= sum;
        }
        for y in 0..64 {
            for x in 0..64 {
                let expect = k[x] * k[y]; // impulse at (32,32), kernel index j = x-32 -> k[x]
                assert!(
                    (out.at(x, y) - expect).abs() < 1e-3,
                    "mismatch at ({x},{y}): {} vs {expect}",
                    out.at(x, y)
                );
            }
        }
    }

    #[test]
    fn fourier_and_spatial_blurs_agree_in_the_interior() {
        let img = random_image(128, 128, 3);
        for sigma in [1.0, 2.0, 4.0] {
            let a = gaussian_blur_fourier(&img, sigma).unwrap();
            let b = gaussian_blur_spatial(&img, sigma).unwrap();
            let margin = (3.0 * sigma).ceil() as usize;
            let mut worst = 0.0f64;
            for y in margin..128 - margin {
                for x in margin..128 - margin {
                    worst = worst.max((a.at(x, y) - b.at(x, y)).abs());
                }
            }
            assert!(worst < 2e-3, "sigma {sigma}: max interior diff {worst}");
        }
    }

    #[test]
    fn box_mean_identity_and_constant() {
        let img = random_image(9, 7, 4);
        assert_eq!(box_mean(&img, 0), img);
        let c = Image::constant(11, 11, 0.5);
        assert!(c.max_abs_diff(&box_mean(&c, 3)) < 1e-12);
    }

    #[test]
    fn box_mean_matches_naive_window_mean() {
        for seed in 0..50 {
            let img = random_image(16, 16, 100 + seed);
            let r = 3usize;
            let fast = box_mean(&img, r);
            for y in 0..16 {
                for x in 0..16 {
                    let x0 = x.saturating_sub(r);
                    let x1 = (x + r + 1).min(16);
                    let y0 = y.saturating_sub(r);
                    let y1 = (y + r + 1).min(16);
                    let mut sum = 0.0;
                    for yy in y0..y1 {
                        for xx in x0..x1 {
                            sum += img.at(xx, yy);
                        }
                    }
                    let naive = sum / ((x1 - x0) * (y1 - y0)) as f64;
                    assert!((fast.at(x, y) - naive).abs() < 1e-10);
                }
            }
        }
    }
}
