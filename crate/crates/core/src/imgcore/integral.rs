use super::{GrayImage, ImageError};

/// Summed-area table: `cumulative(x, y)` is the sum over `[0..=x] x [0..=y]`.
///
/// Sums are kept in `f64`, which is exact for integer intensities on any
/// image that fits in memory.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegralImage {
    width: usize,
    height: usize,
    cumulative: Vec<f64>,
}

impl IntegralImage {
    pub fn new(img: &GrayImage) -> Self {
        let (w, h) = (img.width(), img.height());
        let mut cumulative = vec![0f64; w * h];
        let px = img.pixels();
        for y in 0..h {
            let mut row_sum = 0f64;
            for x in 0..w {
                row_sum += px[y * w + x] as f64;
                let above = if y > 0 { cumulative[(y - 1) * w + x] } else { 0.0 };
                cumulative[y * w + x] = row_sum + above;
            }
        }
        Self {
            width: w,
            height: h,
            cumulative,
        }
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
    pub fn cumulative(&self, x: usize, y: usize) -> f64 {
        self.cumulative[y * self.width + x]
    }

    pub fn total(&self) -> f64 {
        self.cumulative[self.cumulative.len() - 1]
    }

    /// Sum over the inclusive rectangle `[x0, x1] x [y0, y1]`.
    pub fn box_sum(&self, x0: usize, y0: usize, x1: usize, y1: usize) -> Result<f64, ImageError> {
        if x0 > x1 || y0 > y1 || x1 >= self.width || y1 >= self.height {
            return Err(ImageError::RectOutOfRange {
                x0,
                y0,
                x1,
                y1,
                width: self.width,
                height: self.height,
            });
        }
        Ok(self.rect_sum(x0 as isize, y0 as isize, x1 as isize, y1 as isize))
    }

    /// Unchecked inclusive rectangle sum; callers guarantee the bounds.
    #[inline]
    pub(crate) fn rect_sum(&self, x0: isize, y0: isize, x1: isize, y1: isize) -> f64 {
        debug_assert!(x0 >= 0 && y0 >= 0 && x1 < self.width as isize && y1 < self.height as isize);
        let w = self.width as isize;
        let at = |x: isize, y: isize| -> f64 {
            if x < 0 || y < 0 {
                0.0
            } else {
                self.cumulative[(y * w + x) as usize]
            }
        };
        at(x1, y1) - at(x0 - 1, y1) - at(x1, y0 - 1) + at(x0 - 1, y0 - 1)
    }
}
