//! Steered BRIEF: 256 intensity comparisons on a smoothed patch, with the
//! sampling pattern rotated to the keypoint orientation in 12 degree steps.

use std::fmt::Write as _;

use super::OrbError;
use crate::imgcore::{Descriptor, GrayImage, Keypoint};
use crate::rng::SplitMix64;

pub const PATTERN_SEED: u64 = 0x0B1E_F5EE_D000_0001;
pub const PATTERN_PAIRS: usize = 256;
pub const ROTATION_STEPS: usize = 30;
pub const ROTATION_STEP_DEG: f64 = 12.0;
/// Version tag of the frozen pattern fixture.
pub const PATTERN_VERSION: u32 = 1;

pub type PointPair = [i32; 4];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BriefPattern {
    pub patch_size: usize,
    /// `x1 y1 x2 y2` offsets in the canonical (unrotated) frame.
    pub pairs: Vec<PointPair>,
    /// `rotated[k]` is the pattern turned by `12 k` degrees, rounded to pixels.
    pub rotated: Vec<Vec<PointPair>>,
    reach: i32,
}

impl BriefPattern {
    /// Pairs drawn from an isotropic Gaussian with sigma `patch_size / 5`,
    /// rounded to pixels, rejecting points outside the patch radius and
    /// degenerate pairs.
    pub fn generate(patch_size: usize, seed: u64) -> Self {
        let radius = (patch_size / 2) as i32;
        let sigma = patch_size as f64 / 5.0;
        let mut rng = SplitMix64::new(seed);
        let mut point = || loop {
            let x = (rng.normal() * sigma).round() as i32;
            let y = (rng.normal() * sigma).round() as i32;
            if x * x + y * y <= radius * radius {
                break (x, y);
            }
        };
        let mut pairs = Vec::with_capacity(PATTERN_PAIRS);
        while pairs.len() < PATTERN_PAIRS {
            let (x1, y1) = point();
            let (x2, y2) = point();
            if (x1, y1) != (x2, y2) {
                pairs.push([x1, y1, x2, y2]);
            }
        }
        Self::from_pairs(patch_size, pairs)
    }

    pub fn from_pairs(patch_size: usize, pairs: Vec<PointPair>) -> Self {
        let rotated = (0..ROTATION_STEPS)
            .map(|k| {
                let (s, c) = (k as f64 * ROTATION_STEP_DEG).to_radians().sin_cos();
                let rot = |x: i32, y: i32| {
                    let (x, y) = (x as f64, y as f64);
                    ((c * x - s * y).round() as i32, (s * x + c * y).round() as i32)
                };
                pairs
                    .iter()
                    .map(|&[x1, y1, x2, y2]| {
                        let (a, b) = rot(x1, y1);
                        let (c2, d) = rot(x2, y2);
                        [a, b, c2, d]
                    })
                    .collect()
            })
            .collect::<Vec<Vec<PointPair>>>();
        let reach = rotated
            .iter()
            .flatten()
            .flat_map(|p| p.iter().map(|v| v.abs()))
            .max()
            .unwrap_or(0);
        Self {
            patch_size,
            pairs,
            rotated,
            reach,
        }
    }

    pub fn default_for(patch_size: usize) -> Self {
        Self::generate(patch_size, PATTERN_SEED)
    }

    /// Largest absolute coordinate over all rotated copies.
    pub fn reach(&self) -> i32 {
        self.reach
    }

    /// Fixture text: 256 lines of `x1 y1 x2 y2`.
    pub fn to_fixture(&self) -> String {
        let mut s = String::with_capacity(self.pairs.len() * 16);
        for [a, b, c, d] in &self.pairs {
            let _ = writeln!(s, "{a} {b} {c} {d}");
        }
        s
    }

    pub fn from_fixture(patch_size: usize, text: &str) -> Result<Self, OrbError> {
        let mut pairs = Vec::with_capacity(PATTERN_PAIRS);
        for (lineno, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let nums: Result<Vec<i32>, _> = line.split_whitespace().map(str::parse).collect();
            match nums {
                Ok(v) if v.len() == 4 => pairs.push([v[0], v[1], v[2], v[3]]),
                _ => return Err(OrbError::BadPattern(format!("line {}: {line:?}", lineno + 1))),
            }
        }
        if pairs.len() != PATTERN_PAIRS {
            return Err(OrbError::BadPattern(format!(
                "expected {PATTERN_PAIRS} pairs, found {}",
                pairs.len()
            )));
        }
        Ok(Self::from_pairs(patch_size, pairs))
    }

    pub fn rotation_index(orientation_deg: f32) -> usize {
        ((orientation_deg as f64 / ROTATION_STEP_DEG).round() as i64).rem_euclid(ROTATION_STEPS as i64) as usize
    }
}

/// 256-bit descriptor; `kp` is in the coordinate frame of `smoothed`.
/// Bit `i` is set when the first point of pair `i` is darker than the second.
pub fn brief_describe(smoothed: &GrayImage, kp: &Keypoint, pattern: &BriefPattern) -> Result<Descriptor, OrbError> {
    let (cx, cy) = (kp.x.round() as i64, kp.y.round() as i64);
    let reach = pattern.reach() as i64;
    let (w, h) = (smoothed.width() as i64, smoothed.height() as i64);
    if cx - reach < 0 || cy - reach < 0 || cx + reach >= w || cy + reach >= h {
        return Err(OrbError::PatchOutOfBounds { x: kp.x, y: kp.y });
    }
    let rot = &pattern.rotated[BriefPattern::rotation_index(kp.orientation)];
    let at = |dx: i32, dy: i32| smoothed.get((cx + dx as i64) as usize, (cy + dy as i64) as usize);
    let mut words = [0u64; 4];
    for (i, &[x1, y1, x2, y2]) in rot.iter().enumerate() {
        if at(x1, y1) < at(x2, y2) {
            words[i / 64] |= 1 << (i % 64);
        }
    }
    Ok(Descriptor::Binary(words))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pattern_shape() {
        let p = BriefPattern::default_for(31);
        assert_eq!(p.pairs.len(), 256);
        assert_eq!(p.rotated.len(), 30);
        assert_eq!(p.rotated[0], p.pairs);
        for &[a, b, c, d] in &p.pairs {
            assert!(a * a + b * b <= 225 && c * c + d * d <= 225);
            assert_ne!((a, b), (c, d));
        }
        assert!(p.reach() <= 16);
        assert_eq!(p, BriefPattern::default_for(31));
    }

    #[test]
    fn fixture_round_trip() {
        let p = BriefPattern::default_for(31);
        let q = BriefPattern::from_fixture(31, &p.to_fixture()).unwrap();
        assert_eq!(p, q);
        assert!(BriefPattern::from_fixture(31, "1 2 3\n").is_err());
    }

    #[test]
    fn rotation_index_rounds() {
        assert_eq!(BriefPattern::rotation_index(0.0), 0);
        assert_eq!(BriefPattern::rotation_index(5.9), 0);
        assert_eq!(BriefPattern::rotation_index(6.1), 1);
        assert_eq!(BriefPattern::rotation_index(355.0), 0);
        assert_eq!(BriefPattern::rotation_index(24.0), 2);
    }
}
