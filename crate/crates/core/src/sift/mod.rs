//! SIFT: difference-of-Gaussian scale space, extremum detection, subpixel
//! refinement with contrast and edge rejection, gradient-histogram
//! orientation and the 4x4x8 gradient descriptor.

mod descriptor;
mod extrema;
mod orientation;
mod scale_space;

use thiserror::Error;

use crate::imgcore::{Descriptor, GrayImage, Keypoint};

pub use descriptor::{clamp_normalize, describe, describe_one};
pub(crate) use extrema::solve3;
pub use extrema::{detect_extrema, passes_edge_test, refine_keypoints, Candidate};
pub use orientation::{assign_orientations, orientation_histogram, orientation_peaks};
pub use scale_space::{build_scale_space, Octave, ScaleSpace};

pub const DESCRIPTOR_LEN: usize = 128;
pub const DESCRIPTOR_CLAMP: f32 = 0.2;

#[derive(Debug, Clone, PartialEq)]
pub struct SiftConfig {
    pub octaves: usize,
    /// `s`: each octave holds `s + 3` Gaussian and `s + 2` DoG levels.
    pub scales_per_octave: usize,
    pub base_sigma: f64,
    /// Blur already present in the input image.
    pub assumed_blur: f64,
    /// Minimum refined |DoG| on `[0, 1]` intensities.
    pub contrast_threshold: f64,
    pub edge_ratio: f64,
    pub orientation_bins: usize,
    /// Secondary orientation peaks within this fraction of the maximum are kept.
    pub peak_ratio: f64,
    pub max_refine_iterations: usize,
}

impl Default for SiftConfig {
    fn default() -> Self {
        Self {
            octaves: 4,
            scales_per_octave: 3,
            base_sigma: 1.6,
            assumed_blur: 0.5,
            contrast_threshold: 0.03,
            edge_ratio: 10.0,
            orientation_bins: 36,
            peak_ratio: 0.8,
            max_refine_iterations: 5,
        }
    }
}

impl SiftConfig {
    pub fn validate(&self) -> Result<(), SiftError> {
        let ok = self.octaves >= 1
            && self.scales_per_octave >= 1
            && self.base_sigma > self.assumed_blur
            && self.assumed_blur >= 0.0
            && self.contrast_threshold > 0.0
            && self.edge_ratio > 0.0
            && self.orientation_bins >= 3
            && self.peak_ratio > 0.0
            && self.peak_ratio <= 1.0;
        if ok {
            Ok(())
        } else {
            Err(SiftError::InvalidConfig(format!("{self:?}")))
        }
    }
}

#[derive(Debug, Error)]
pub enum SiftError {
    #[error("image {width}x{height} too small for {octaves} octaves (each octave needs at least 8x8)")]
    ImageTooSmall {
        width: usize,
        height: usize,
        octaves: usize,
    },
    #[error("invalid SIFT configuration: {0}")]
    InvalidConfig(String),
}

/// Runs the full pipeline. Keypoints and descriptors are index-aligned and
/// sorted by descending response.
pub fn sift_detect(img: &GrayImage, cfg: &SiftConfig) -> Result<(Vec<Keypoint>, Vec<Descriptor>), SiftError> {
    let ss = build_scale_space(img, cfg)?;
    let candidates = detect_extrema(&ss, cfg);
    let mut refined = refine_keypoints(&candidates, &ss, cfg);
    // Neighbouring candidates can converge onto the same refined extremum.
    refined.sort_by(|a, b| {
        a.octave
            .cmp(&b.octave)
            .then(a.y.total_cmp(&b.y))
            .then(a.x.total_cmp(&b.x))
            .then(a.scale.total_cmp(&b.scale))
    });
    refined.dedup_by(|a, b| a.octave == b.octave && a.x == b.x && a.y == b.y && a.scale == b.scale);
    let oriented = assign_orientations(&refined, &ss, cfg);

    let mut pairs: Vec<(Keypoint, Vec<f32>)> = oriented
        .iter()
        .filter_map(|kp| describe_one(kp, &ss).map(|d| (*kp, d)))
        .collect();
    // Stable sort after a total positional order keeps ties deterministic.
    pairs.sort_by(|a, b| {
        (a.0.y, a.0.x, a.0.scale, a.0.orientation)
            .partial_cmp(&(b.0.y, b.0.x, b.0.scale, b.0.orientation))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    pairs.sort_by(|a, b| b.0.response.total_cmp(&a.0.response));
    Ok(pairs.into_iter().map(|(k, d)| (k, Descriptor::Real(d))).unzip())
}

/// Fractional level of `kp` inside its octave.
pub(crate) fn level_of(kp: &Keypoint, cfg: &SiftConfig) -> f64 {
    let s = cfg.scales_per_octave as f64;
    ((kp.scale as f64 / cfg.base_sigma).log2() - kp.octave as f64) * s
}
