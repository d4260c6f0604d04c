//! SURF: box-filter Hessian responses on an integral image, 3x3x3
//! non-maximum suppression over a filter-size lattice, Haar-wavelet
//! orientation and the 64-value descriptor with the Laplacian sign.

mod describe;
mod hessian;
mod orientation;

use thiserror::Error;

use crate::imgcore::{Descriptor, GrayImage, IntegralImage, Keypoint};

pub use describe::{descriptor_window_fits, surf_describe};
pub use hessian::{
    build_lattice, filter_size, hessian_response, lattice_maxima, surf_detect, HessianResponse, ResponseLattice,
};
pub use orientation::{haar_x, haar_y, surf_orientation};

pub const DESCRIPTOR_LEN: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct SurfConfig {
    pub octaves: usize,
    pub levels_per_octave: usize,
    /// Smallest filter side; 9 gives the 9/15/21/27 ladder of the first octave.
    pub base_filter: usize,
    /// Lattice stride of the first octave; doubles each octave.
    pub base_step: usize,
    /// Minimum Hessian determinant on `[0, 1]` intensities.
    pub hessian_threshold: f64,
    /// Weight applied to `Dxy` before squaring in the determinant.
    pub cross_weight: f64,
}

impl Default for SurfConfig {
    fn default() -> Self {
        Self {
            octaves: 4,
            levels_per_octave: 4,
            base_filter: 9,
            base_step: 1,
            hessian_threshold: 0.002,
            cross_weight: 0.9,
        }
    }
}

impl SurfConfig {
    pub fn validate(&self) -> Result<(), SurfError> {
        let ok = self.octaves >= 1
            && self.levels_per_octave >= 3
            && self.base_filter >= 9
            && self.base_filter % 2 == 1
            && self.base_filter.is_multiple_of(3)
            && self.base_step >= 1
            && self.hessian_threshold > 0.0
            && self.cross_weight > 0.0;
        if ok {
            Ok(())
        } else {
            Err(SurfError::InvalidConfig(format!("{self:?}")))
        }
    }
}

#[derive(Debug, Error)]
pub enum SurfError {
    #[error("filter of size {filter} at ({x}, {y}) does not fit in {width}x{height} image")]
    FootprintOutOfBounds {
        x: usize,
        y: usize,
        filter: usize,
        width: usize,
        height: usize,
    },
    #[error("image {width}x{height} too small for the first SURF octave")]
    ImageTooSmall { width: usize, height: usize },
    #[error("invalid SURF configuration: {0}")]
    InvalidConfig(String),
}

/// Detection, orientation and description. Keypoints whose descriptor
/// window leaves the image are dropped; outputs are index-aligned and sorted
/// by descending response.
pub fn surf_extract(img: &GrayImage, cfg: &SurfConfig) -> Result<(Vec<Keypoint>, Vec<Descriptor>), SurfError> {
    let ii = IntegralImage::new(img);
    let mut kps: Vec<Keypoint> = surf_detect_integral(&ii, cfg)?
        .into_iter()
        .filter(|kp| descriptor_window_fits(kp, ii.width(), ii.height()))
        .collect();
    for kp in kps.iter_mut() {
        kp.orientation = surf_orientation(&ii, kp);
    }
    kps.sort_by(|a, b| {
        (a.y, a.x, a.scale)
            .partial_cmp(&(b.y, b.x, b.scale))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    kps.sort_by(|a, b| b.response.total_cmp(&a.response));
    let descs = surf_describe(&ii, &kps);
    Ok((kps, descs))
}

pub(crate) use hessian::surf_detect_integral;
