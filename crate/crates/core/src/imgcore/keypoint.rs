use serde::{Deserialize, Serialize};

/// Detected interest point in source-image coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Keypoint {
    pub x: f32,
    pub y: f32,
    /// Characteristic scale in pixels.
    pub scale: f32,
    /// Degrees in `[0, 360)`, measured from +x towards +y (image rows grow downwards).
    pub orientation: f32,
    pub response: f32,
    pub octave: u32,
    /// Sign of the Hessian trace for SURF keypoints, 0 for other detectors.
    pub laplacian_sign: i8,
}

impl Keypoint {
    pub fn new(x: f32, y: f32, scale: f32) -> Self {
        Self {
            x,
            y,
            scale,
            orientation: 0.0,
            response: 0.0,
            octave: 0,
            laplacian_sign: 0,
        }
    }

    pub fn record(&self) -> KeypointRecord {
        KeypointRecord {
            x: self.x,
            y: self.y,
            scale: self.scale,
            orientation_deg: self.orientation,
            response: self.response,
            octave: self.octave,
            laplacian_sign: self.laplacian_sign,
        }
    }
}

/// One entry of the keypoint JSON dump.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KeypointRecord {
    pub x: f32,
    pub y: f32,
    pub scale: f32,
    pub orientation_deg: f32,
    pub response: f32,
    pub octave: u32,
    pub laplacian_sign: i8,
}

/// Serializes keypoints as a JSON array sorted by descending response.
pub fn dump_keypoints(kps: &[Keypoint]) -> serde_json::Result<String> {
    let mut records: Vec<KeypointRecord> = kps.iter().map(Keypoint::record).collect();
    records.sort_by(|a, b| b.response.total_cmp(&a.response));
    serde_json::to_string_pretty(&records)
}

pub const BINARY_BITS: usize = 256;

#[derive(Debug, Clone, PartialEq)]
pub enum Descriptor {
    /// Unit-length (or all-zero) real vector: 128 values for SIFT, 64 for SURF.
    Real(Vec<f32>),
    /// 256 test bits, bit `i` stored at `words[i / 64] >> (i % 64)`.
    Binary([u64; 4]),
}

impl Descriptor {
    pub fn len(&self) -> usize {
        match self {
            Descriptor::Real(v) => v.len(),
            Descriptor::Binary(_) => BINARY_BITS,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn as_real(&self) -> Option<&[f32]> {
        match self {
            Descriptor::Real(v) => Some(v),
            Descriptor::Binary(_) => None,
        }
    }

    pub fn as_binary(&self) -> Option<&[u64; 4]> {
        match self {
            Descriptor::Binary(b) => Some(b),
            Descriptor::Real(_) => None,
        }
    }

    pub fn bit(&self, i: usize) -> Option<bool> {
        self.as_binary().map(|w| (w[i / 64] >> (i % 64)) & 1 == 1)
    }
}

#[inline]
pub fn hamming(a: &[u64; 4], b: &[u64; 4]) -> u32 {
    a.iter().zip(b).map(|(x, y)| (x ^ y).count_ones()).sum()
}
