//! Self-guided guided filter.
//!
//! Per window, the output is the least-squares affine fit `a*u + b` of the
//! image to itself, ridge-regularized by `epsilon`; each pixel then averages
//! the coefficients of every window that covers it:
//!
//! `a = var(u) / (var(u) + eps)`, `b = (1 - a) * mean(u)`,
//! `out = mean(a) * u + mean(b)`.
//!
//! All window statistics use the border-aware [`box_mean`].

use crate::blur::box_mean;
use crate::error::{Error, Result};
use crate::image::Image;

pub fn filter_gf(input: &Image, radius: usize, epsilon: f64) -> Result<Image> {
    if radius < 1 {
        return Err(Error::Parameter("guided filter: radius must be >= 1".into()));
    }
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::Parameter(format!(
            "guided filter: epsilon must be > 0, got {epsilon}"
        )));
    }
    let mean = box_mean(input, radius);
    let mean_sq = box_mean(&input.zip_map(input, |a, b| a * b), radius);
    // var can come out a hair negative from cancellation; clamp at zero.
    let var = mean_sq.zip_map(&mean, |sq, m| (sq - m * m).max(0.0));
    let a = var.map(|v| v / (v + epsilon));
    let b = a.zip_map(&mean, |a, m| (1.0 - a) * m);
    let mean_a = box_mean(&a, radius);
    let mean_b = box_mean(&b, radius);
    Ok(mean_a.zip_map(input, |a, u| a * u).add(&mean_b))
}
