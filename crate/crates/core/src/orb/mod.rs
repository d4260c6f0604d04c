//! ORB: FAST-9 corners on an image pyramid, Harris top-N selection,
//! intensity-centroid orientation and steered BRIEF descriptors.

mod brief;
mod fast;
mod harris;

use std::sync::OnceLock;

use thiserror::Error;

use crate::imgcore::{Descriptor, GrayImage, Keypoint};

pub use brief::{brief_describe, BriefPattern, PointPair, PATTERN_SEED, PATTERN_VERSION};
pub use fast::{fast_detect, FastCorner, CIRCLE};
pub use harris::{harris_rank, harris_score, RankedCorner, HARRIS_K};

/// Frozen copy of the default 31x31 pattern.
pub const PATTERN_FIXTURE: &str = include_str!("../../fixtures/brief_pattern_v1.txt");

#[derive(Debug, Clone, PartialEq)]
pub struct OrbConfig {
    pub n_features: usize,
    pub fast_threshold: i32,
    pub pyramid_levels: usize,
    pub pyramid_scale: f64,
    pub patch_size: usize,
    pub centroid_radius: usize,
    /// Gaussian sigma applied to each level before the BRIEF tests.
    pub brief_sigma: f64,
}

impl Default for OrbConfig {
    fn default() -> Self {
        Self {
            n_features: 500,
            fast_threshold: 20,
            pyramid_levels: 8,
            pyramid_scale: 1.2,
            patch_size: 31,
            centroid_radius: 15,
            brief_sigma: 2.0,
        }
    }
}

impl OrbConfig {
    pub fn validate(&self) -> Result<(), OrbError> {
        let ok = self.n_features >= 1
            && self.fast_threshold >= 1
            && self.pyramid_levels >= 1
            && self.pyramid_scale > 1.0
            && self.patch_size >= 5
            && self.patch_size % 2 == 1
            && self.centroid_radius >= 1
            && self.brief_sigma > 0.0;
        if ok {
            Ok(())
        } else {
            Err(OrbError::InvalidConfig(format!("{self:?}")))
        }
    }
}

#[derive(Debug, Error)]
pub enum OrbError {
    #[error("disc of radius {radius} at ({x}, {y}) leaves the image")]
    DiscOutOfBounds { x: usize, y: usize, radius: usize },
    #[error("BRIEF patch at ({x}, {y}) leaves the image")]
    PatchOutOfBounds { x: f32, y: f32 },
    #[error("malformed BRIEF pattern: {0}")]
    BadPattern(String),
    #[error("invalid ORB configuration: {0}")]
    InvalidConfig(String),
}

/// Orientation of the intensity centroid of the disc around `(x, y)`, in
/// degrees `[0, 360)`; 0 when both first moments vanish.
pub fn orientation_centroid(img: &GrayImage, x: usize, y: usize, radius: usize) -> Result<f32, OrbError> {
    if x < radius || y < radius || x + radius >= img.width() || y + radius >= img.height() {
        return Err(OrbError::DiscOutOfBounds { x, y, radius });
    }
    let r = radius as isize;
    let (mut m10, mut m01) = (0f64, 0f64);
    for j in -r..=r {
        let yy = (y as isize + j) as usize;
        for i in -r..=r {
            if i * i + j * j > r * r {
                continue;
            }
            let v = img.get((x as isize + i) as usize, yy) as f64;
            m10 += i as f64 * v;
            m01 += j as f64 * v;
        }
    }
    if m10 == 0.0 && m01 == 0.0 {
        return Ok(0.0);
    }
    let a = m01.atan2(m10).to_degrees().rem_euclid(360.0);
    Ok(if a >= 360.0 { 0.0 } else { a as f32 })
}

/// One pyramid level: the resampled image and its scale relative to level 0.
#[derive(Debug, Clone)]
pub struct PyramidLevel {
    pub image: GrayImage,
    pub scale: f64,
}

/// Levels shrink by `pyramid_scale`, each resampled bilinearly from the
/// previous one; building stops once a level cannot hold a full patch.
pub fn build_pyramid(img: &GrayImage, cfg: &OrbConfig, min_side: usize) -> Vec<PyramidLevel> {
    let mut levels = vec![PyramidLevel {
        image: img.clone(),
        scale: 1.0,
    }];
    for l in 1..cfg.pyramid_levels {
        let prev = &levels[l - 1].image;
        let w = (prev.width() as f64 / cfg.pyramid_scale).round() as usize;
        let h = (prev.height() as f64 / cfg.pyramid_scale).round() as usize;
        if w < min_side || h < min_side {
            break;
        }
        let image = resample(prev, w, h);
        let scale = levels[l - 1].scale * cfg.pyramid_scale;
        levels.push(PyramidLevel { image, scale });
    }
    levels
}

/// Bilinear resize with pixel centres aligned and source coordinates clamped.
fn resample(src: &GrayImage, w: usize, h: usize) -> GrayImage {
    let (sw, sh) = (src.width(), src.height());
    let taps = |n: usize, sn: usize| -> Vec<(usize, usize, f32)> {
        let f = sn as f64 / n as f64;
        (0..n)
            .map(|i| {
                let s = ((i as f64 + 0.5) * f - 0.5).clamp(0.0, (sn - 1) as f64);
                let i0 = s.floor() as usize;
                (i0, (i0 + 1).min(sn - 1), (s - i0 as f64) as f32)
            })
            .collect()
    };
    let (xs, ys) = (taps(w, sw), taps(h, sh));
    let px = src.pixels();
    let mut out = Vec::with_capacity(w * h);
    for &(y0, y1, fy) in &ys {
        let (r0, r1) = (&px[y0 * sw..(y0 + 1) * sw], &px[y1 * sw..(y1 + 1) * sw]);
        out.extend(xs.iter().map(|&(x0, x1, fx)| {
            let top = r0[x0] + (r0[x1] - r0[x0]) * fx;
            let bottom = r1[x0] + (r1[x1] - r1[x0]) * fx;
            (top + (bottom - top) * fy).clamp(0.0, 255.0)
        }));
    }
    GrayImage::new(w, h, out).expect("resampled level is valid")
}

/// Per-level feature budgets proportional to level area, summing to `n`.
pub(crate) fn level_budgets(levels: &[PyramidLevel], n: usize) -> Vec<usize> {
    let areas: Vec<f64> = levels
        .iter()
        .map(|l| (l.image.width() * l.image.height()) as f64)
        .collect();
    let total: f64 = areas.iter().sum();
    let mut budgets: Vec<usize> = areas.iter().map(|a| (n as f64 * a / total).floor() as usize).collect();
    let assigned: usize = budgets[1..].iter().sum();
    budgets[0] = n - assigned;
    budgets
}

/// Full ORB pipeline with the default seeded pattern.
pub fn orb_detect(img: &GrayImage, cfg: &OrbConfig) -> Result<(Vec<Keypoint>, Vec<Descriptor>), OrbError> {
    static DEFAULT: OnceLock<BriefPattern> = OnceLock::new();
    let default = DEFAULT.get_or_init(|| BriefPattern::default_for(OrbConfig::default().patch_size));
    if cfg.patch_size == default.patch_size {
        orb_detect_with(img, cfg, default)
    } else {
        orb_detect_with(img, cfg, &BriefPattern::default_for(cfg.patch_size))
    }
}

pub fn orb_detect_with(
    img: &GrayImage,
    cfg: &OrbConfig,
    pattern: &BriefPattern,
) -> Result<(Vec<Keypoint>, Vec<Descriptor>), OrbError> {
    cfg.validate()?;
    let margin = (pattern.reach() as usize).max(cfg.centroid_radius) + 1;
    let levels = build_pyramid(img, cfg, 2 * margin + 1);
    let budgets = level_budgets(&levels, cfg.n_features);

    let mut out: Vec<(Keypoint, Descriptor)> = Vec::new();
    for (l, (level, &budget)) in levels.iter().zip(&budgets).enumerate() {
        if budget == 0 {
            continue;
        }
        let (w, h) = (level.image.width(), level.image.height());
        if w < 2 * margin + 1 || h < 2 * margin + 1 {
            continue;
        }
        let corners: Vec<FastCorner> = fast_detect(&level.image, cfg.fast_threshold)
            .into_iter()
            .filter(|c| c.x >= margin && c.y >= margin && c.x + margin < w && c.y + margin < h)
            .collect();
        let corners = fast::suppress_non_max(&corners, w, h);
        let ranked = harris_rank(&level.image, &corners, budget);
        if ranked.is_empty() {
            continue;
        }
        let smoothed = crate::imgcore::filter::gaussian_blur_fast(&level.image, cfg.brief_sigma)
            .map_err(|e| OrbError::InvalidConfig(e.to_string()))?;
        for c in ranked {
            let angle = orientation_centroid(&level.image, c.x, c.y, cfg.centroid_radius)?;
            let mut local = Keypoint::new(c.x as f32, c.y as f32, cfg.patch_size as f32);
            local.orientation = angle;
            let desc = brief_describe(&smoothed, &local, pattern)?;
            let s = level.scale;
            let kp = Keypoint {
                x: ((c.x as f64 + 0.5) * s - 0.5) as f32,
                y: ((c.y as f64 + 0.5) * s - 0.5) as f32,
                scale: (cfg.patch_size as f64 * s) as f32,
                orientation: angle,
                response: c.harris as f32,
                octave: l as u32,
                laplacian_sign: 0,
            };
            out.push((kp, desc));
        }
    }
    out.sort_by(|a, b| {
        b.0.response
            .total_cmp(&a.0.response)
            .then(a.0.octave.cmp(&b.0.octave))
            .then(a.0.y.total_cmp(&b.0.y))
            .then(a.0.x.total_cmp(&b.0.x))
    });
    Ok(out.into_iter().unzip())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imgcore::synth;

    #[test]
    fn frozen_fixture_matches_generator() {
        let generated = BriefPattern::default_for(31);
        assert_eq!(generated.to_fixture(), PATTERN_FIXTURE);
    }

    #[test]
    fn constant_image_is_empty() {
        let img = GrayImage::filled(128, 128, 60.0).unwrap();
        let (k, d) = orb_detect(&img, &OrbConfig::default()).unwrap();
        assert!(k.is_empty() && d.is_empty());
    }

    #[test]
    fn budget_and_alignment() {
        let img = synth::scene(256, 256, 8);
        let cfg = OrbConfig {
            n_features: 120,
            ..OrbConfig::default()
        };
        let (k, d) = orb_detect(&img, &cfg).unwrap();
        assert!(!k.is_empty() && k.len() <= 120);
        assert_eq!(k.len(), d.len());
        assert!(d.iter().all(|d| d.len() == 256 && d.as_binary().is_some()));
        for kp in &k {
            assert!(kp.x >= 0.0 && kp.x < 256.0 && kp.y >= 0.0 && kp.y < 256.0);
        }
    }

    #[test]
    fn budgets_sum() {
        let img = GrayImage::filled(200, 160, 1.0).unwrap();
        let levels = build_pyramid(&img, &OrbConfig::default(), 33);
        assert!(levels.len() > 1);
        let b = level_budgets(&levels, 500);
        assert_eq!(b.iter().sum::<usize>(), 500);
        assert!(b.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn centroid_examples() {
        let half = GrayImage::from_fn(41, 41, |x, _| if x > 20 { 200.0 } else { 50.0 }).unwrap();
        let a = orientation_centroid(&half, 20, 20, 15).unwrap();
        assert!(a.min(360.0 - a) < 5.0);
        let sym = synth::gaussian_blob(41, 41, 20.0, 20.0, 5.0, 0.0, 200.0);
        assert_eq!(orientation_centroid(&sym, 20, 20, 15).unwrap(), 0.0);
        assert!(orientation_centroid(&sym, 10, 20, 15).is_err());
    }
}
