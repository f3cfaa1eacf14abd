//! Grayscale base+detail decomposition filters and an artifact benchmark.
//!
//! This crate implements seven representative edge-aware smoothing filters
//! behind one decomposition interface, deterministic generators for four
//! artifact test patterns, one measure per artifact (luminance halo,
//! staircasing, compartmentalization, contrast halo), a cross-calibration
//! routine that equalizes every filter's detail output, and a benchmark
//! that fuses the four measures into a single score and ranks the filters.
//!
//! The narrative guide lives in `book/`; its code snippets are compiled and
//! run as doc-tests by the companion `basedetail-book` crate.
//!
//! ```
//! use basedetail::{decompose, FilterId, FilterSpec, Image};
//!
//! let input = Image::from_fn(64, 64, |x, y| {
//!     0.5 + 0.3 * (((x / 16) + (y / 16)) % 2) as f64 - 0.15
//! });
//! let spec = FilterSpec::paper_preset(FilterId::GF);
//! let d = decompose(&input, &spec).unwrap();
//! assert_eq!(d.base.add(&d.detail), input); // additivity is exact
//! ```

pub mod bench;
pub mod blur;
pub mod calibrate;
pub mod error;
pub mod filters;
pub mod image;
pub mod io;
pub mod measures;
pub mod patterns;
pub mod pyramid;

pub use crate::image::{
    gradients, log_luminance, psnr_detail, variance_masked, Image, Mask,
};
pub use blur::{box_mean, gaussian_blur_fourier, gaussian_blur_spatial};
pub use error::{Error, Result};
pub use filters::{decompose, enhance, Decomposition, FilterId, FilterSpec};
pub use io::{load_image, save_image, save_mask};
pub use pyramid::{
    build_laplacian_pyramid, collapse_laplacian_pyramid, LaplacianPyramid,
};
