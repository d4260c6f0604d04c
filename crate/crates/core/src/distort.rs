//! Deterministic generators for the distorted half of every benchmark pair.
//!
//! Angles follow the keypoint convention: positive rotation turns +x towards
//! +y, which is clockwise on screen because image rows grow downwards.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::imgcore::{sample_bilinear, GrayImage, ImageError};
use crate::rng::SplitMix64;

#[derive(Debug, Error)]
pub enum DistortError {
    #[error("gain must be positive, got {0}")]
    NonPositiveGain(f64),
    #[error("scale factor must be positive, got {0}")]
    NonPositiveFactor(f64),
    #[error("scaling {width}x{height} by {factor} gives an empty image")]
    DegenerateSize { width: usize, height: usize, factor: f64 },
    #[error("fisheye strength must be non-negative, got {0}")]
    NegativeFisheye(f64),
    #[error("noise density must lie in [0, 1], got {0}")]
    DensityOutOfRange(f64),
    #[error("invalid scenario {spec:?}: {reason}")]
    Parse { spec: String, reason: String },
    #[error(transparent)]
    Image(#[from] ImageError),
}

/// One image transformation with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scenario {
    Identity,
    Intensity { gain: f64, bias: f64 },
    Rotation { angle_deg: f64 },
    Scaling { factor: f64 },
    Shearing { kx: f64 },
    Fisheye { k: f64 },
    Noise { density: f64, seed: u64 },
}

impl Scenario {
    pub fn kind(&self) -> &'static str {
        match self {
            Scenario::Identity => "identity",
            Scenario::Intensity { .. } => "intensity",
            Scenario::Rotation { .. } => "rotation",
            Scenario::Scaling { .. } => "scaling",
            Scenario::Shearing { .. } => "shearing",
            Scenario::Fisheye { .. } => "fisheye",
            Scenario::Noise { .. } => "noise",
        }
    }

    pub fn validate(&self) -> Result<(), DistortError> {
        match *self {
            Scenario::Intensity { gain, .. } if !(gain > 0.0) => Err(DistortError::NonPositiveGain(gain)),
            Scenario::Scaling { factor } if !(factor > 0.0) => Err(DistortError::NonPositiveFactor(factor)),
            Scenario::Fisheye { k } if !(k >= 0.0) => Err(DistortError::NegativeFisheye(k)),
            Scenario::Noise { density, .. } if !(0.0..=1.0).contains(&density) => {
                Err(DistortError::DensityOutOfRange(density))
            }
            _ => Ok(()),
        }
    }

    pub fn apply(&self, img: &GrayImage) -> Result<GrayImage, DistortError> {
        match *self {
            Scenario::Identity => Ok(img.clone()),
            Scenario::Intensity { gain, bias } => adjust_intensity(img, gain, bias),
            Scenario::Rotation { angle_deg } => Ok(rotate(img, angle_deg)),
            Scenario::Scaling { factor } => scale(img, factor),
            Scenario::Shearing { kx } => Ok(shear(img, kx)),
            Scenario::Fisheye { k } => fisheye(img, k),
            Scenario::Noise { density, seed } => salt_pepper(img, density, seed),
        }
    }

    /// Builds a scenario from a kind name and `key=value` pairs.
    pub fn from_parts(kind: &str, params: &[(String, String)], seed: Option<u64>) -> Result<Self, DistortError> {
        let spec = || {
            let p: Vec<String> = params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            format!("{kind}:{}", p.join(","))
        };
        let bad = |reason: String| DistortError::Parse { spec: spec(), reason };
        let lookup = |allowed: &[&str]| -> Result<Vec<Option<f64>>, DistortError> {
            let mut out = vec![None; allowed.len()];
            for (k, v) in params {
                let idx = allowed
                    .iter()
                    .position(|a| a == k)
                    .ok_or_else(|| bad(format!("unknown parameter {k:?}")))?;
                let val: f64 = v
                    .trim()
                    .parse()
                    .map_err(|_| bad(format!("parameter {k} has non-numeric value {v:?}")))?;
                if !val.is_finite() {
                    return Err(bad(format!("parameter {k} is not finite")));
                }
                out[idx] = Some(val);
            }
            Ok(out)
        };
        let scenario = match kind {
            "identity" => {
                if !params.is_empty() {
                    return Err(bad("identity takes no parameters".into()));
                }
                Scenario::Identity
            }
            "intensity" => {
                let v = lookup(&["gain", "bias"])?;
                Scenario::Intensity {
                    gain: v[0].unwrap_or(1.0),
                    bias: v[1].unwrap_or(30.0),
                }
            }
            "rotation" => {
                let v = lookup(&["angle"])?;
                Scenario::Rotation {
                    angle_deg: v[0].ok_or_else(|| bad("missing angle".into()))?,
                }
            }
            "scaling" => {
                let v = lookup(&["factor"])?;
                Scenario::Scaling {
                    factor: v[0].ok_or_else(|| bad("missing factor".into()))?,
                }
            }
            "shearing" => {
                let v = lookup(&["kx"])?;
                Scenario::Shearing {
                    kx: v[0].ok_or_else(|| bad("missing kx".into()))?,
                }
            }
            "fisheye" => {
                let v = lookup(&["k"])?;
                Scenario::Fisheye {
                    k: v[0].ok_or_else(|| bad("missing k".into()))?,
                }
            }
            "noise" => {
                let v = lookup(&["density", "seed"])?;
                let seed = match (v[1], seed) {
                    (Some(s), _) if s >= 0.0 && s.fract() == 0.0 => s as u64,
                    (Some(_), _) => return Err(bad("seed must be a non-negative integer".into())),
                    (None, Some(s)) => s,
                    (None, None) => 0,
                };
                Scenario::Noise {
                    density: v[0].ok_or_else(|| bad("missing density".into()))?,
                    seed,
                }
            }
            other => return Err(bad(format!("unknown kind {other:?}"))),
        };
        scenario.validate()?;
        Ok(scenario)
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Scenario::Identity => write!(f, "identity"),
            Scenario::Intensity { gain, bias } => {
                write!(f, "intensity:gain={:?},bias={}", gain, bias)
            }
            Scenario::Rotation { angle_deg } => write!(f, "rotation:angle={angle_deg}"),
            Scenario::Scaling { factor } => write!(f, "scaling:factor={factor}"),
            Scenario::Shearing { kx } => write!(f, "shearing:kx={kx}"),
            Scenario::Fisheye { k } => write!(f, "fisheye:k={k}"),
            Scenario::Noise { density, seed } => write!(f, "noise:density={density},seed={seed}"),
        }
    }
}

impl FromStr for Scenario {
    type Err = DistortError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut params = Vec::new();
        for part in rest.split(',').filter(|p| !p.trim().is_empty()) {
            let (k, v) = part.split_once('=').ok_or_else(|| DistortError::Parse {
                spec: s.to_string(),
                reason: format!("expected key=value, got {part:?}"),
            })?;
            params.push((k.trim().to_string(), v.trim().to_string()));
        }
        Scenario::from_parts(kind.trim(), &params, None)
    }
}

/// `out = clamp(gain * in + bias, 0, 255)`.
pub fn adjust_intensity(img: &GrayImage, gain: f64, bias: f64) -> Result<GrayImage, DistortError> {
    if !(gain > 0.0) {
        return Err(DistortError::NonPositiveGain(gain));
    }
    let px = img
        .pixels()
        .iter()
        .map(|&v| (gain * v as f64 + bias).clamp(0.0, 255.0) as f32)
        .collect();
    Ok(GrayImage::new(img.width(), img.height(), px)?)
}

/// Exact sine and cosine for multiples of 90 degrees.
fn sin_cos_deg(angle_deg: f64) -> (f64, f64) {
    let a = angle_deg.rem_euclid(360.0);
    if a.fract() == 0.0 && (a as i64) % 90 == 0 {
        match a as i64 {
            0 => (0.0, 1.0),
            90 => (1.0, 0.0),
            180 => (0.0, -1.0),
            _ => (-1.0, 0.0),
        }
    } else {
        a.to_radians().sin_cos()
    }
}

fn warp(width: usize, height: usize, src: &GrayImage, map: impl Fn(f64, f64) -> (f64, f64)) -> GrayImage {
    let mut out = Vec::with_capacity(width * height);
    for y in 0..height {
        for x in 0..width {
            let (sx, sy) = map(x as f64, y as f64);
            out.push(sample_bilinear(src, sx, sy));
        }
    }
    GrayImage::from_clamped(width, height, out)
}

/// Rotation about `((w-1)/2, (h-1)/2)` on the input canvas; uncovered pixels are 0.
pub fn rotate(img: &GrayImage, angle_deg: f64) -> GrayImage {
    let (s, c) = sin_cos_deg(angle_deg);
    let cx = (img.width() as f64 - 1.0) / 2.0;
    let cy = (img.height() as f64 - 1.0) / 2.0;
    warp(img.width(), img.height(), img, |x, y| {
        let (dx, dy) = (x - cx, y - cy);
        (cx + c * dx + s * dy, cy - s * dx + c * dy)
    })
}

/// Bilinear resampling to `round(w * factor) x round(h * factor)`; output
/// pixel `(x, y)` samples the source at `(x / factor, y / factor)`, clamped
/// to the last row and column.
pub fn scale(img: &GrayImage, factor: f64) -> Result<GrayImage, DistortError> {
    if !(factor > 0.0) || !factor.is_finite() {
        return Err(DistortError::NonPositiveFactor(factor));
    }
    let w = (img.width() as f64 * factor).round() as usize;
    let h = (img.height() as f64 * factor).round() as usize;
    if w == 0 || h == 0 {
        return Err(DistortError::DegenerateSize {
            width: img.width(),
            height: img.height(),
            factor,
        });
    }
    let (maxx, maxy) = ((img.width() - 1) as f64, (img.height() - 1) as f64);
    Ok(warp(w, h, img, |x, y| ((x / factor).min(maxx), (y / factor).min(maxy))))
}

/// Width of the canvas produced by [`shear`].
pub fn shear_width(width: usize, height: usize, kx: f64) -> usize {
    width + (kx.abs() * (height as f64 - 1.0)).ceil() as usize
}

/// Horizontal shear: source `(x, y)` lands at `(x + kx * y, y)`.
///
/// The map is applied without translation, so row 0 is fixed for every `kx`;
/// with negative `kx` lower rows move out to the left and are clipped.
pub fn shear(img: &GrayImage, kx: f64) -> GrayImage {
    let w = shear_width(img.width(), img.height(), kx);
    warp(w, img.height(), img, |x, y| (x - kx * y, y))
}

/// Barrel distortion on radius normalized to 1 at the half-diagonal: a
/// destination pixel at radius `r` samples the source at `r * (1 + k r^2)`.
pub fn fisheye(img: &GrayImage, k: f64) -> Result<GrayImage, DistortError> {
    if !(k >= 0.0) {
        return Err(DistortError::NegativeFisheye(k));
    }
    if k == 0.0 {
        return Ok(img.clone());
    }
    let cx = (img.width() as f64 - 1.0) / 2.0;
    let cy = (img.height() as f64 - 1.0) / 2.0;
    let half_diag = (cx * cx + cy * cy).sqrt().max(f64::MIN_POSITIVE);
    Ok(warp(img.width(), img.height(), img, |x, y| {
        let (dx, dy) = (x - cx, y - cy);
        let r = (dx * dx + dy * dy).sqrt() / half_diag;
        let g = 1.0 + k * r * r;
        (cx + dx * g, cy + dy * g)
    }))
}

/// Overwrites exactly `round(density * w * h)` distinct pixels chosen by a
/// seeded partial Fisher-Yates shuffle. The first `ceil(n / 2)` chosen
/// positions become 255 (salt), the rest 0 (pepper).
pub fn salt_pepper(img: &GrayImage, density: f64, seed: u64) -> Result<GrayImage, DistortError> {
    if !(0.0..=1.0).contains(&density) {
        return Err(DistortError::DensityOutOfRange(density));
    }
    let total = img.width() * img.height();
    let count = (density * total as f64).round() as usize;
    let mut px = img.pixels().to_vec();
    for (i, pos) in noise_positions(total, count, seed).into_iter().enumerate() {
        px[pos] = if i < count.div_ceil(2) { 255.0 } else { 0.0 };
    }
    Ok(GrayImage::from_clamped(img.width(), img.height(), px))
}

/// First `count` entries of a seeded permutation of `0..total`.
pub fn noise_positions(total: usize, count: usize, seed: u64) -> Vec<usize> {
    let mut rng = SplitMix64::new(seed);
    let mut idx: Vec<usize> = (0..total).collect();
    for i in 0..count.min(total) {
        let j = i + rng.below((total - i) as u64) as usize;
        idx.swap(i, j);
    }
    idx.truncate(count.min(total));
    idx
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp(w: usize, h: usize) -> GrayImage {
        GrayImage::from_fn(w, h, |x, y| (10 + (x * 7 + y * 13) % 230) as f32).unwrap()
    }

    #[test]
    fn intensity_examples() {
        let img = ramp(9, 5);
        assert_eq!(adjust_intensity(&img, 1.0, 0.0).unwrap(), img);
        let c = GrayImage::filled(3, 3, 100.0).unwrap();
        assert!(adjust_intensity(&c, 1.0, 30.0)
            .unwrap()
            .pixels()
            .iter()
            .all(|&v| v == 130.0));
        let p = GrayImage::filled(1, 1, 200.0).unwrap();
        assert_eq!(adjust_intensity(&p, 1.2, 25.0).unwrap().pixels(), &[255.0]);
        assert!(adjust_intensity(&p, 0.0, 1.0).is_err());
    }

    #[test]
    fn rotation_identity_and_quarter_turns() {
        let img = ramp(7, 7);
        assert_eq!(rotate(&img, 0.0), img);
        let mut r = img.clone();
        for _ in 0..4 {
            r = rotate(&r, 90.0);
        }
        assert_eq!(r, img);
    }

    #[test]
    fn rotation_90_on_2x2_matches_inverse_map() {
        let img = GrayImage::new(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        // Inverse map for +90 degrees about (0.5, 0.5): src = (cx + dy, cy - dx).
        let mut expected = vec![0.0; 4];
        for y in 0..2 {
            for x in 0..2 {
                let (dx, dy) = (x as f64 - 0.5, y as f64 - 0.5);
                let (sx, sy) = ((0.5 + dy) as usize, (0.5 - dx) as usize);
                expected[y * 2 + x] = img.get(sx, sy);
            }
        }
        assert_eq!(expected, vec![3.0, 1.0, 4.0, 2.0]);
        assert_eq!(rotate(&img, 90.0).pixels(), expected.as_slice());
    }

    #[test]
    fn scale_examples() {
        let img = ramp(6, 4);
        assert_eq!(scale(&img, 1.0).unwrap(), img);
        let big = scale(&GrayImage::filled(100, 80, 50.0).unwrap(), 2.0).unwrap();
        assert_eq!((big.width(), big.height()), (200, 160));
        assert!(big.pixels().iter().all(|&v| v == 50.0));
        assert!(matches!(scale(&img, 0.01), Err(DistortError::DegenerateSize { .. })));
        assert!(scale(&img, -1.0).is_err());
    }

    #[test]
    fn shear_examples() {
        let img = ramp(30, 30);
        assert_eq!(shear(&img, 0.0), img);
        let mut px = vec![0.0; 40 * 30];
        px[20 * 40 + 10] = 200.0;
        let dot = GrayImage::new(40, 30, px).unwrap();
        let s = shear(&dot, 0.5);
        assert_eq!(s.width(), 40 + 15);
        assert_eq!(s.get(20, 20), 200.0);
        for kx in [-0.7, 0.3, 1.0] {
            let s = shear(&img, kx);
            assert_eq!(s.width(), shear_width(30, 30, kx));
            assert_eq!(&s.pixels()[..30], &img.pixels()[..30]);
        }
    }

    #[test]
    fn fisheye_examples() {
        let img = ramp(21, 15);
        assert_eq!(fisheye(&img, 0.0).unwrap(), img);
        let f = fisheye(&img, 0.7).unwrap();
        assert_eq!(f.get(10, 7), img.get(10, 7));
        assert!(fisheye(&img, -0.1).is_err());
    }

    #[test]
    fn fisheye_radial_oracle() {
        // 101x101, half-diagonal = 50*sqrt(2). Pixel on the +x axis at r = 0.8.
        let img = GrayImage::filled(101, 101, 200.0).unwrap();
        let f = fisheye(&img, 0.5).unwrap();
        let half_diag = 50.0 * 2f64.sqrt();
        let dx = 0.8 * half_diag; // 56.57 > 50: destination itself is off-canvas horizontally
        assert!(dx > 50.0);
        // Diagonal direction: destination at r = 0.8 samples source r = 1.056 which is outside.
        let d = (0.8 * half_diag / 2f64.sqrt()).round();
        let r = (2.0 * d * d).sqrt() / half_diag;
        let src_r = r * (1.0 + 0.5 * r * r);
        assert!(src_r > 1.0);
        assert_eq!(f.get(50 + d as usize, 50 + d as usize), 0.0);
        // A small radius stays inside and keeps the constant.
        assert_eq!(f.get(55, 50), 200.0);
    }

    #[test]
    fn noise_examples() {
        let img = GrayImage::filled(100, 100, 128.0).unwrap();
        assert_eq!(salt_pepper(&img, 0.0, 1).unwrap(), img);
        let n = salt_pepper(&img, 0.3, 42).unwrap();
        let changed: Vec<f32> = n.pixels().iter().copied().filter(|&v| v != 128.0).collect();
        assert_eq!(changed.len(), 3000);
        assert_eq!(changed.iter().filter(|&&v| v == 255.0).count(), 1500);
        assert_eq!(changed.iter().filter(|&&v| v == 0.0).count(), 1500);
        assert_eq!(salt_pepper(&img, 0.3, 42).unwrap(), n);
        assert!(salt_pepper(&img, 1.5, 0).is_err());
    }

    #[test]
    fn scenario_strings_round_trip() {
        for s in [
            "rotation:angle=45",
            "scaling:factor=2",
            "shearing:kx=0.5",
            "fisheye:k=0.5",
            "noise:density=0.3,seed=42",
            "intensity:gain=1.0,bias=30",
            "identity",
        ] {
            let sc: Scenario = s.parse().unwrap();
            assert_eq!(sc.to_string(), s);
        }
        assert!("rotation".parse::<Scenario>().is_err());
        assert!("warp:x=1".parse::<Scenario>().is_err());
        assert!("noise:density=2".parse::<Scenario>().is_err());
        assert!("identity:x=1".parse::<Scenario>().is_err());
    }
}
