use super::{SiftConfig, SiftError};
use crate::imgcore::{GrayImage, Plane};

#[derive(Debug, Clone)]
pub struct Octave {
    /// `s + 3` progressively blurred images.
    pub gaussians: Vec<Plane>,
    /// `dogs[i] = gaussians[i + 1] - gaussians[i]`.
    pub dogs: Vec<Plane>,
}

/// Gaussian and DoG pyramids on `[0, 1]` intensities.
#[derive(Debug, Clone)]
pub struct ScaleSpace {
    pub octaves: Vec<Octave>,
    /// Blur of each Gaussian level relative to its own octave's pixel grid.
    pub level_sigmas: Vec<f64>,
    pub scales_per_octave: usize,
}

impl ScaleSpace {
    /// Blur of `level` in `octave`, measured in input-image pixels.
    pub fn absolute_sigma(&self, octave: usize, level: usize) -> f64 {
        self.level_sigmas[level] * (1u64 << octave) as f64
    }
}

/// Incremental blurs taking level `i - 1` to level `i`, for `i >= 1`.
pub(crate) fn incremental_sigmas(cfg: &SiftConfig) -> (Vec<f64>, Vec<f64>) {
    let s = cfg.scales_per_octave as f64;
    let levels = cfg.scales_per_octave + 3;
    let sigmas: Vec<f64> = (0..levels).map(|i| cfg.base_sigma * 2f64.powf(i as f64 / s)).collect();
    let increments = (1..levels)
        .map(|i| (sigmas[i].powi(2) - sigmas[i - 1].powi(2)).sqrt())
        .collect();
    (sigmas, increments)
}

pub fn build_scale_space(img: &GrayImage, cfg: &SiftConfig) -> Result<ScaleSpace, SiftError> {
    cfg.validate()?;
    let shrink = 1usize << (cfg.octaves - 1);
    if img.width() / shrink < 8 || img.height() / shrink < 8 {
        return Err(SiftError::ImageTooSmall {
            width: img.width(),
            height: img.height(),
            octaves: cfg.octaves,
        });
    }
    let (level_sigmas, increments) = incremental_sigmas(cfg);
    let initial = (cfg.base_sigma.powi(2) - cfg.assumed_blur.powi(2)).sqrt();
    let mut base = img.to_normalized_plane().gaussian_blur(initial);

    let mut octaves = Vec::with_capacity(cfg.octaves);
    for o in 0..cfg.octaves {
        let mut gaussians = Vec::with_capacity(cfg.scales_per_octave + 3);
        gaussians.push(base);
        for &inc in &increments {
            let next = gaussians.last().expect("level 0 present").gaussian_blur(inc);
            gaussians.push(next);
        }
        let dogs = gaussians
            .windows(2)
            .map(|pair| Plane {
                width: pair[0].width,
                height: pair[0].height,
                data: pair[1].data.iter().zip(&pair[0].data).map(|(b, a)| b - a).collect(),
            })
            .collect();
        base = if o + 1 < cfg.octaves {
            gaussians[cfg.scales_per_octave].downsample2()
        } else {
            Plane::zeros(1, 1)
        };
        octaves.push(Octave { gaussians, dogs });
    }
    Ok(ScaleSpace {
        octaves,
        level_sigmas,
        scales_per_octave: cfg.scales_per_octave,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn structure_counts() {
        let img = GrayImage::from_fn(64, 64, |x, y| ((x * 3 + y * 5) % 255) as f32).unwrap();
        let ss = build_scale_space(&img, &SiftConfig::default()).unwrap();
        assert_eq!(ss.octaves.len(), 4);
        for (o, oct) in ss.octaves.iter().enumerate() {
            assert_eq!(oct.gaussians.len(), 6);
            assert_eq!(oct.dogs.len(), 5);
            assert_eq!(oct.gaussians[0].width, 64 >> o);
        }
        let k = 2f64.powf(1.0 / 3.0);
        for w in ss.level_sigmas.windows(2) {
            assert!((w[1] / w[0] - k).abs() < 1e-12);
        }
        assert!((ss.absolute_sigma(1, 0) - 3.2).abs() < 1e-12);
    }

    #[test]
    fn constant_image_gives_zero_dog() {
        let img = GrayImage::filled(96, 80, 77.0).unwrap();
        let ss = build_scale_space(&img, &SiftConfig::default()).unwrap();
        for oct in &ss.octaves {
            for d in &oct.dogs {
                assert!(d.data.iter().all(|&v| v.abs() < 1e-6));
            }
        }
    }
}
