//! Laplacian pyramids with the classic 5-tap `[1 4 6 4 1]/16` kernel.
//!
//! Levels shrink as `ceil(n/2)`; the last level is the Gaussian residual.
//! Collapse adds back exactly what build subtracted, so the round trip is an
//! identity up to floating-point rounding.

use crate::blur::mirror_index;
use crate::error::{Error, Result};
use crate::image::Image;

const KERNEL: [f64; 5] = [1.0 / 16.0, 4.0 / 16.0, 6.0 / 16.0, 4.0 / 16.0, 1.0 / 16.0];

/// A Laplacian pyramid: `levels[0..l_max]` are band-pass images, the final
/// entry is the low-pass Gaussian residual.
#[derive(Debug, Clone)]
pub struct LaplacianPyramid {
    pub levels: Vec<Image>,
}

fn half(n: usize) -> usize {
    n.div_ceil(2)
}

fn blur_rows_5tap(img: &Image) -> Image {
    let (w, h) = (img.width(), img.height());
    Image::from_fn(w, h, |x, y| {
        let mut acc = 0.0;
        for (j, &k) in KERNEL.iter().enumerate() {
            acc += k * img.at(mirror_index(x as isize + j as isize - 2, w), y);
        }
        acc
    })
}

fn blur_5tap(img: &Image) -> Image {
    let rows = blur_rows_5tap(img);
    let (w, h) = (rows.width(), rows.height());
    Image::from_fn(w, h, |x, y| {
        let mut acc = 0.0;
        for (j, &k) in KERNEL.iter().enumerate() {
            acc += k * rows.at(x, mirror_index(y as isize + j as isize - 2, h));
        }
        acc
    })
}

/// Blur and keep the even-indexed samples.
pub(crate) fn downsample(img: &Image) -> Image {
    let low = blur_5tap(img);
    Image::from_fn(half(img.width()), half(img.height()), |x, y| {
        low.at(2 * x, 2 * y)
    })
}

/// Zero-stuffing upsample to the requested size, interpolated with the same
/// kernel at double weight so constants are preserved.
pub(crate) fn upsample(img: &Image, out_w: usize, out_h: usize) -> Image {
    debug_assert_eq!(half(out_w), img.width());
    debug_assert_eq!(half(out_h), img.height());
    let rows = Image::from_fn(out_w, img.height(), |x, y| {
        // out[x] = sum_j 2*K[j] * coarse[(x+j-2)/2] over even x+j-2
        let mut acc = 0.0;
        for (j, &k) in KERNEL.iter().enumerate() {
            let t = x as isize + j as isize - 2;
            if t.rem_euclid(2) == 0 {
                acc += 2.0 * k * img.at(mirror_index(t / 2, img.width()), y);
            }
        }
        acc
    });
    Image::from_fn(out_w, out_h, |x, y| {
        let mut acc = 0.0;
        for (j, &k) in KERNEL.iter().enumerate() {
            let t = y as isize + j as isize - 2;
            if t.rem_euclid(2) == 0 {
                acc += 2.0 * k * rows.at(x, mirror_index(t / 2, rows.height()));
            }
        }
        acc
    })
}

/// Gaussian pyramid: `l_max + 1` progressively blurred and halved images,
/// `levels[0]` being the input itself.
pub fn build_gaussian_pyramid(img: &Image, l_max: usize) -> Result<Vec<Image>> {
    check_depth(img, l_max)?;
    let mut levels = Vec::with_capacity(l_max + 1);
    levels.push(img.clone());
    for _ in 0..l_max {
        let next = downsample(levels.last().unwrap());
        levels.push(next);
    }
    Ok(levels)
}

fn check_depth(img: &Image, l_max: usize) -> Result<()> {
    if l_max < 1 {
        return Err(Error::Parameter("pyramid depth must be >= 1".into()));
    }
    let need = 1usize << l_max;
    if img.width() < need || img.height() < need {
        return Err(Error::Parameter(format!(
            "image {}x{} too small for {} pyramid levels (needs >= {need} per side)",
            img.width(),
            img.height(),
            l_max
        )));
    }
    Ok(())
}

/// Burt–Adelson construction: each band-pass level is the difference between
/// a Gaussian level and the upsampled next one.
pub fn build_laplacian_pyramid(img: &Image, l_max: usize) -> Result<LaplacianPyramid> {
    let gauss = build_gaussian_pyramid(img, l_max)?;
    let mut levels = Vec::with_capacity(l_max + 1);
    for l in 0..l_max {
        let up = upsample(&gauss[l + 1], gauss[l].width(), gauss[l].height());
        levels.push(gauss[l].sub(&up));
    }
    levels.push(gauss[l_max].clone());
    Ok(LaplacianPyramid { levels })
}

/// Upsample-and-add from the residual back to full resolution.
pub fn collapse_laplacian_pyramid(pyr: &LaplacianPyramid) -> Result<Image> {
    if pyr.levels.len() < 2 {
        return Err(Error::Structure(
            "pyramid needs at least one band-pass level and a residual".into(),
        ));
    }
    for l in 0..pyr.levels.len() - 1 {
        let (fine, coarse) = (&pyr.levels[l], &pyr.levels[l + 1]);
        if half(fine.width()) != coarse.width() || half(fine.height()) != coarse.height() {
            return Err(Error::Structure(format!(
                "level {} is {}x{} but level {} is {}x{}",
                l,
                fine.width(),
                fine.height(),
                l + 1,
                coarse.width(),
                coarse.height()
            )));
        }
    }
    let mut acc = pyr.levels.last().unwrap().clone();
    for l in (0..pyr.levels.len() - 1).rev() {
        let target = &pyr.levels[l];
        acc = target.add(&upsample(&acc, target.width(), target.height()));
    }
    Ok(acc)
}
