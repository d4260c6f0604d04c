use super::ImageError;

/// 8-bit grayscale raster stored as `f32` intensities in `[0, 255]`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<f32>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<f32>) -> Result<Self, ImageError> {
        check_dims(width, height, pixels.len())?;
        if let Some((index, &value)) = pixels.iter().enumerate().find(|(_, v)| !(0.0..=255.0).contains(*v)) {
            return Err(ImageError::IntensityOutOfRange { index, value });
        }
        Ok(Self { width, height, pixels })
    }

    pub fn filled(width: usize, height: usize, value: f32) -> Result<Self, ImageError> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn from_u8(width: usize, height: usize, bytes: &[u8]) -> Result<Self, ImageError> {
        check_dims(width, height, bytes.len())?;
        Ok(Self {
            width,
            height,
            pixels: bytes.iter().map(|&b| b as f32).collect(),
        })
    }

    /// Builds an image by evaluating `f(x, y)` at every pixel, clamping to `[0, 255]`.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f32) -> Result<Self, ImageError> {
        check_dims(width, height, width * height)?;
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(clamp_intensity(f(x, y)));
            }
        }
        Ok(Self { width, height, pixels })
    }

    /// Wraps a buffer that is already known to satisfy the range invariant.
    pub(crate) fn from_clamped(width: usize, height: usize, pixels: Vec<f32>) -> Self {
        debug_assert_eq!(pixels.len(), width * height);
        debug_assert!(pixels.iter().all(|v| (0.0..=255.0).contains(v)));
        Self { width, height, pixels }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn pixels(&self) -> &[f32] {
        &self.pixels
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f32 {
        self.pixels[y * self.width + x]
    }

    /// Intensities rounded to the nearest 8-bit value.
    pub fn to_u8(&self) -> Vec<u8> {
        self.pixels.iter().map(|&v| v.round() as u8).collect()
    }

    /// Copy with every intensity divided by 255.
    pub fn to_normalized_plane(&self) -> Plane {
        Plane {
            width: self.width,
            height: self.height,
            data: self.pixels.iter().map(|&v| v / 255.0).collect(),
        }
    }

    pub fn as_plane(&self) -> Plane {
        Plane {
            width: self.width,
            height: self.height,
            data: self.pixels.clone(),
        }
    }

    pub fn mean(&self) -> f64 {
        self.pixels.iter().map(|&v| v as f64).sum::<f64>() / self.pixels.len() as f64
    }
}

/// Real-valued raster without a range constraint.
#[derive(Debug, Clone, PartialEq)]
pub struct Plane {
    pub width: usize,
    pub height: usize,
    pub data: Vec<f32>,
}

impl Plane {
    pub fn zeros(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            data: vec![0.0; width * height],
        }
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f32 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: f32) {
        self.data[y * self.width + x] = v;
    }

    /// Clamps into `[0, 255]` and wraps as an image.
    pub fn to_gray_clamped(&self) -> GrayImage {
        GrayImage::from_clamped(
            self.width,
            self.height,
            self.data.iter().map(|&v| clamp_intensity(v)).collect(),
        )
    }
}

#[inline]
pub(crate) fn clamp_intensity(v: f32) -> f32 {
    if v.is_nan() {
        0.0
    } else {
        v.clamp(0.0, 255.0)
    }
}

fn check_dims(width: usize, height: usize, len: usize) -> Result<(), ImageError> {
    if width == 0 || height == 0 {
        return Err(ImageError::InvalidDimensions { width, height });
    }
    if len != width * height {
        return Err(ImageError::BufferLength {
            expected: width * height,
            actual: len,
        });
    }
    Ok(())
}
