//! Raster types, file I/O and the numeric kernels shared by every detector.
//!
//! [`GrayImage`] holds intensities in `[0, 255]` as `f32`; quantization only
//! happens when writing files. [`Plane`] is the same raster without the range
//! invariant and is used for normalized or derived data (DoG levels, gradients).

mod error;
pub(crate) mod filter;
mod image;
mod integral;
mod keypoint;
mod pgm;
pub mod synth;

pub use error::ImageError;
pub use filter::{downsample2, gaussian_blur, gaussian_kernel, sample_bilinear};
pub use image::{GrayImage, Plane};
pub use integral::IntegralImage;
pub use keypoint::{dump_keypoints, hamming, Descriptor, Keypoint, KeypointRecord, BINARY_BITS};
pub use pgm::{load_pgm, read_pgm, save_pgm, write_pgm, PgmEncoding};
