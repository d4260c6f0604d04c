use super::{GrayImage, ImageError, Plane};

/// Sampled, normalized Gaussian of radius `ceil(3 * sigma)`.
pub fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    let radius = (3.0 * sigma).ceil().max(1.0) as isize;
    let denom = 2.0 * sigma * sigma;
    let mut kernel: Vec<f64> = (-radius..=radius).map(|i| (-((i * i) as f64) / denom).exp()).collect();
    let sum: f64 = kernel.iter().sum();
    kernel.iter_mut().for_each(|k| *k /= sum);
    kernel
}

/// Separable Gaussian blur with replicated borders.
pub fn gaussian_blur(img: &GrayImage, sigma: f64) -> Result<GrayImage, ImageError> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(ImageError::InvalidSigma(sigma));
    }
    let data = blur_buffer(img.width(), img.height(), img.pixels(), sigma);
    // A convex combination of values in [0, 255] stays there up to rounding.
    let data = data.into_iter().map(|v| v.clamp(0.0, 255.0)).collect();
    Ok(GrayImage::from_clamped(img.width(), img.height(), data))
}

impl Plane {
    /// Separable Gaussian blur with replicated borders. `sigma` must be positive.
    pub fn gaussian_blur(&self, sigma: f64) -> Plane {
        assert!(sigma > 0.0, "sigma must be positive");
        Plane {
            width: self.width,
            height: self.height,
            data: blur_buffer(self.width, self.height, &self.data, sigma),
        }
    }

    pub fn downsample2(&self) -> Plane {
        let (w, h) = (self.width / 2, self.height / 2);
        let mut data = Vec::with_capacity(w * h);
        for y in 0..h {
            let row = &self.data[2 * y * self.width..];
            data.extend((0..w).map(|x| row[2 * x]));
        }
        Plane {
            width: w,
            height: h,
            data,
        }
    }

    pub fn sample_bilinear(&self, x: f64, y: f64) -> f32 {
        bilinear(self.width, self.height, &self.data, x, y)
    }
}

/// Accumulator precision for the separable blur.
pub(crate) trait Accum: Copy + Default + std::ops::Add<Output = Self> + std::ops::Mul<Output = Self> {
    fn from_f64(v: f64) -> Self;
    fn from_f32(v: f32) -> Self;
    fn to_f32(self) -> f32;
}

impl Accum for f64 {
    fn from_f64(v: f64) -> Self {
        v
    }
    fn from_f32(v: f32) -> Self {
        v as f64
    }
    fn to_f32(self) -> f32 {
        self as f32
    }
}

impl Accum for f32 {
    fn from_f64(v: f64) -> Self {
        v as f32
    }
    fn from_f32(v: f32) -> Self {
        v
    }
    fn to_f32(self) -> f32 {
        self
    }
}

pub(crate) fn blur_buffer(w: usize, h: usize, src: &[f32], sigma: f64) -> Vec<f32> {
    blur_buffer_with::<f64>(w, h, src, sigma)
}

/// Single-precision blur of a gray image, for callers that only compare
/// smoothed intensities and care more about speed than the last digits.
pub(crate) fn gaussian_blur_fast(img: &GrayImage, sigma: f64) -> Result<GrayImage, ImageError> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(ImageError::InvalidSigma(sigma));
    }
    let data = blur_buffer_with::<f32>(img.width(), img.height(), img.pixels(), sigma);
    let data = data.into_iter().map(|v| v.clamp(0.0, 255.0)).collect();
    Ok(GrayImage::from_clamped(img.width(), img.height(), data))
}

fn blur_buffer_with<A: Accum>(w: usize, h: usize, src: &[f32], sigma: f64) -> Vec<f32> {
    let kernel: Vec<A> = gaussian_kernel(sigma).into_iter().map(A::from_f64).collect();
    let r = (kernel.len() / 2) as isize;
    let (wi, hi) = (w as isize, h as isize);

    let ru = r as usize;
    let mut tmp = vec![0f32; w * h];
    let mut padded = vec![A::default(); w + 2 * ru];
    let mut acc = vec![A::default(); w];
    for y in 0..h {
        let row = &src[y * w..(y + 1) * w];
        for (i, p) in padded.iter_mut().enumerate() {
            *p = A::from_f32(row[(i as isize - r).clamp(0, wi - 1) as usize]);
        }
        acc.iter_mut().for_each(|a| *a = A::default());
        for (k, &kv) in kernel.iter().enumerate() {
            for (a, &v) in acc.iter_mut().zip(&padded[k..k + w]) {
                *a = *a + kv * v;
            }
        }
        for (o, &a) in tmp[y * w..(y + 1) * w].iter_mut().zip(&acc) {
            *o = a.to_f32();
        }
    }

    let mut dst = vec![0f32; w * h];
    for y in 0..hi {
        acc.iter_mut().for_each(|a| *a = A::default());
        for (k, &kv) in kernel.iter().enumerate() {
            let sy = (y + k as isize - r).clamp(0, hi - 1) as usize;
            let row = &tmp[sy * w..(sy + 1) * w];
            for (a, &v) in acc.iter_mut().zip(row) {
                *a = *a + kv * A::from_f32(v);
            }
        }
        let out = &mut dst[y as usize * w..(y as usize + 1) * w];
        for (o, &a) in out.iter_mut().zip(&acc) {
            *o = a.to_f32();
        }
    }
    dst
}

/// Keeps every second pixel in each direction: `out(x, y) = in(2x, 2y)`.
pub fn downsample2(img: &GrayImage) -> Result<GrayImage, ImageError> {
    if img.width() < 2 || img.height() < 2 {
        return Err(ImageError::TooSmall {
            width: img.width(),
            height: img.height(),
            min_width: 2,
            min_height: 2,
        });
    }
    let plane = img.as_plane().downsample2();
    Ok(GrayImage::from_clamped(plane.width, plane.height, plane.data))
}

/// Bilinear interpolation; coordinates outside `[0, w-1] x [0, h-1]` give 0.
pub fn sample_bilinear(img: &GrayImage, x: f64, y: f64) -> f32 {
    bilinear(img.width(), img.height(), img.pixels(), x, y)
}

#[inline]
pub(crate) fn bilinear(w: usize, h: usize, data: &[f32], x: f64, y: f64) -> f32 {
    if !(x >= 0.0 && y >= 0.0 && x <= (w - 1) as f64 && y <= (h - 1) as f64) {
        return 0.0;
    }
    let x0 = x.floor() as usize;
    let y0 = y.floor() as usize;
    let fx = x - x0 as f64;
    let fy = y - y0 as f64;
    let x1 = (x0 + 1).min(w - 1);
    let y1 = (y0 + 1).min(h - 1);
    let p00 = data[y0 * w + x0] as f64;
    if fx == 0.0 && fy == 0.0 {
        return p00 as f32;
    }
    let p10 = data[y0 * w + x1] as f64;
    let p01 = data[y1 * w + x0] as f64;
    let p11 = data[y1 * w + x1] as f64;
    let top = p00 + (p10 - p00) * fx;
    let bottom = p01 + (p11 - p01) * fx;
    (top + (bottom - top) * fy) as f32
}

#[cfg(test)]
mod tests {
    use super::*;

    fn img(w: usize, h: usize, px: &[f32]) -> GrayImage {
        GrayImage::new(w, h, px.to_vec()).unwrap()
    }

    #[test]
    fn blur_preserves_constant() {
        let c = GrayImage::filled(9, 7, 7.0).unwrap();
        let b = gaussian_blur(&c, 2.3).unwrap();
        assert!(b.pixels().iter().all(|&v| (v - 7.0).abs() < 1e-5));
    }

    #[test]
    fn tiny_sigma_is_near_identity() {
        let src = GrayImage::from_fn(12, 12, |x, y| ((x * 37 + y * 91) % 256) as f32).unwrap();
        let b = gaussian_blur(&src, 0.01).unwrap();
        for (a, b) in src.pixels().iter().zip(b.pixels()) {
            assert!((a - b).abs() < 0.5);
        }
    }

    #[test]
    fn blur_rejects_bad_sigma() {
        let c = GrayImage::filled(3, 3, 1.0).unwrap();
        assert!(matches!(gaussian_blur(&c, 0.0), Err(ImageError::InvalidSigma(_))));
        assert!(matches!(gaussian_blur(&c, -1.0), Err(ImageError::InvalidSigma(_))));
    }

    #[test]
    fn kernel_radius_and_mass() {
        let k = gaussian_kernel(1.6);
        assert_eq!(k.len(), 2 * 5 + 1);
        assert!((k.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bilinear_contract() {
        let im = img(2, 2, &[0.0, 100.0, 0.0, 0.0]);
        assert_eq!(sample_bilinear(&im, 1.0, 0.0), 100.0);
        assert_eq!(sample_bilinear(&im, 0.5, 0.0), 50.0);
        assert_eq!(sample_bilinear(&im, -1.0, -1.0), 0.0);
        assert_eq!(sample_bilinear(&im, 1.0001, 0.0), 0.0);
        assert_eq!(sample_bilinear(&im, 1.0, 1.0), 0.0);
    }

    #[test]
    fn downsample_rules() {
        let c = GrayImage::filled(4, 4, 3.0).unwrap();
        let d = downsample2(&c).unwrap();
        assert_eq!((d.width(), d.height()), (2, 2));
        assert!(d.pixels().iter().all(|&v| v == 3.0));

        let mut px = vec![0.0; 16];
        px[2 * 4 + 2] = 99.0;
        let d = downsample2(&img(4, 4, &px)).unwrap();
        assert_eq!(d.pixels(), &[0.0, 0.0, 0.0, 99.0]);

        let d = downsample2(&GrayImage::filled(5, 5, 1.0).unwrap()).unwrap();
        assert_eq!((d.width(), d.height()), (2, 2));

        assert!(matches!(
            downsample2(&GrayImage::filled(1, 4, 1.0).unwrap()),
            Err(ImageError::TooSmall { .. })
        ));
    }
}
