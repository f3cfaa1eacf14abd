//! Fast bilateral filter on a space-range grid.
//!
//! Pixels are splatted homogeneously (value and weight channels) into a 3D
//! grid sampled every `sigma_s` pixels spatially and every
//! `(max - min)/(slices - 1)` intensity units along the range axis. The grid
//! is blurred by a Gaussian of one cell spatially — one grid cell is exactly
//! `sigma_s` — and of `sigma_r` intensity units along the range axis, then
//! sliced trilinearly at each pixel's own coordinates and normalized by the
//! weight channel.
//!
//! Anchoring the range axis on the actual min/max keeps narrow-dynamic
//! inputs fully resolved.

use crate::blur::gaussian_kernel;
use crate::error::{Error, Result};
use crate::image::Image;

struct Grid {
    nx: usize,
    ny: usize,
    nz: usize,
    /// Interleaved (value, weight) pairs, x-major then y then z.
    cells: Vec<[f64; 2]>,
}

impl Grid {
    fn new(nx: usize, ny: usize, nz: usize) -> Grid {
        Grid {
            nx,
            ny,
            nz,
            cells: vec![[0.0; 2]; nx * ny * nz],
        }
    }

    #[inline]
    fn idx(&self, x: usize, y: usize, z: usize) -> usize {
        (z * self.ny + y) * self.nx + x
    }
}

/// Blur one axis of the homogeneous grid with a normalized sampled-Gaussian
/// kernel, mirroring at the ends. `stride`/`count`/`lines` describe the axis
/// layout inside the flat cell buffer.
fn blur_axis(grid: &mut Grid, kernel: &[f64], axis: usize) {
    let (nx, ny, nz) = (grid.nx, grid.ny, grid.nz);
    let (len, stride): (usize, usize) = match axis {
        0 => (nx, 1),
        1 => (ny, nx),
        _ => (nz, nx * ny),
    };
    if len == 1 {
        return;
    }
    let radius = kernel.len() / 2;
    let mut line = vec![[0.0f64; 2]; len];
    // Iterate over every 1D line along the chosen axis.
    let outer: Vec<(usize, usize)> = match axis {
        0 => (0..nz).flat_map(|z| (0..ny).map(move |y| (y, z))).collect(),
        1 => (0..nz).flat_map(|z| (0..nx).map(move |x| (x, z))).collect(),
        _ => (0..ny).flat_map(|y| (0..nx).map(move |x| (x, y))).collect(),
    };
    for (a, b) in outer {
        let base = match axis {
            0 => grid.idx(0, a, b),
            1 => grid.idx(a, 0, b),
            _ => grid.idx(a, b, 0),
        };
        for (i, cell) in line.iter_mut().enumerate() {
            *cell = grid.cells[base + i * stride];
        }
        for i in 0..len {
            let mut acc = [0.0f64; 2];
            for (j, &kv) in kernel.iter().enumerate() {
                let t = i as isize + j as isize - radius as isize;
                let t = crate::blur::mirror_index(t, len);
                acc[0] += kv * line[t][0];
                acc[1] += kv * line[t][1];
            }
            grid.cells[base + i * stride] = acc;
        }
    }
}

pub fn filter_fbf(input: &Image, sigma_s: f64, sigma_r: f64, slices: usize) -> Result<Image> {
    if !(sigma_s.is_finite() && sigma_s > 0.0) || !(sigma_r.is_finite() && sigma_r > 0.0) {
        return Err(Error::Parameter(format!(
            "bilateral grid: sigma_s and sigma_r must be > 0, got {sigma_s}, {sigma_r}"
        )));
    }
    if slices < 2 {
        return Err(Error::Parameter(
            "bilateral grid: need at least 2 intensity slices".into(),
        ));
    }
    let (w, h) = (input.width(), input.height());
    let (lo, hi) = input.min_max();
    if hi - lo < 1e-12 {
        return Ok(input.clone()); // flat image, nothing to mix
    }
    let step = (hi - lo) / (slices - 1) as f64;

    let nx = ((w - 1) as f64 / sigma_s).ceil() as usize + 1;
    let ny = ((h - 1) as f64 / sigma_s).ceil() as usize + 1;
    let nz = slices;
    let mut grid = Grid::new(nx, ny, nz);

    // Homogeneous trilinear splat.
    for y in 0..h {
        for x in 0..w {
            let v = input.at(x, y);
            let fx = x as f64 / sigma_s;
            let fy = y as f64 / sigma_s;
            let fz = (v - lo) / step;
            splat(&mut grid, fx, fy, fz, v);
        }
    }

    // One grid cell is sigma_s pixels, so a unit-sigma blur here is a
    // sigma_s-pixel spatial Gaussian. The range axis is sampled much finer
    // than sigma_r, so its blur spans sigma_r/step cells.
    let spatial_kernel = gaussian_kernel(1.0);
    let range_kernel = gaussian_kernel(sigma_r / step);
    blur_axis(&mut grid, &spatial_kernel, 0);
    blur_axis(&mut grid, &spatial_kernel, 1);
    blur_axis(&mut grid, &range_kernel, 2);

    // Trilinear slice and homogeneous divide.
    let mut out = Image::zeros(w, h);
    for y in 0..h {
        for x in 0..w {
            let v = input.at(x, y);
            let fx = x as f64 / sigma_s;
            let fy = y as f64 / sigma_s;
            let fz = (v - lo) / step;
            let [val, wt] = slice(&grid, fx, fy, fz);
            out.set(x, y, if wt > 1e-12 { val / wt } else { v });
        }
    }
    Ok(out)
}

fn corners(f: f64, n: usize) -> (usize, usize, f64) {
    let i0 = (f.floor() as usize).min(n - 1);
    let i1 = (i0 + 1).min(n - 1);
    (i0, i1, f - i0 as f64)
}

fn splat(grid: &mut Grid, fx: f64, fy: f64, fz: f64, value: f64) {
    let (x0, x1, tx) = corners(fx, grid.nx);
    let (y0, y1, ty) = corners(fy, grid.ny);
    let (z0, z1, tz) = corners(fz, grid.nz);
    for (z, wz) in [(z0, 1.0 - tz), (z1, tz)] {
        for (y, wy) in [(y0, 1.0 - ty), (y1, ty)] {
            for (x, wx) in [(x0, 1.0 - tx), (x1, tx)] {
                let wgt = wx * wy * wz;
                if wgt == 0.0 {
                    continue;
                }
                let idx = grid.idx(x, y, z);
                grid.cells[idx][0] += wgt * value;
                grid.cells[idx][1] += wgt;
            }
        }
    }
}

fn slice(grid: &Grid, fx: f64, fy: f64, fz: f64) -> [f64; 2] {
    let (x0, x1, tx) = corners(fx, grid.nx);
    let (y0, y1, ty) = corners(fy, grid.ny);
    let (z0, z1, tz) = corners(fz, grid.nz);
    let mut acc = [0.0f64; 2];
    for (z, wz) in [(z0, 1.0 - tz), (z1, tz)] {
        for (y, wy) in [(y0, 1.0 - ty), (y1, ty)] {
            for (x, wx) in [(x0, 1.0 - tx), (x1, tx)] {
                let wgt = wx * wy * wz;
                if wgt == 0.0 {
                    continue;
                }
                let cell = grid.cells[grid.idx(x, y, z)];
                acc[0] += wgt * cell[0];
                acc[1] += wgt * cell[1];
            }
        }
    }
    acc
}
