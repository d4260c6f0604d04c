use super::fast::FastCorner;
use crate::imgcore::GrayImage;

pub const HARRIS_K: f64 = 0.04;
pub const HARRIS_WINDOW: isize = 7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankedCorner {
    pub x: usize,
    pub y: usize,
    pub harris: f64,
}

/// `det(M) - k tr(M)^2` of the structure tensor summed over a 7x7 window of
/// Sobel gradients (replicated borders).
pub fn harris_score(img: &GrayImage, x: usize, y: usize) -> f64 {
    let (w, h) = (img.width(), img.height());
    let r = HARRIS_WINDOW / 2;
    let reach = r as usize + 1;
    let (sxx, syy, sxy) = if x >= reach && y >= reach && x + reach < w && y + reach < h {
        let px = img.pixels();
        tensor(
            |xx, yy| px[yy as usize * w + xx as usize] as f64,
            x as isize,
            y as isize,
            r,
        )
    } else {
        let (wi, hi) = (w as isize, h as isize);
        tensor(
            |xx, yy| img.get(xx.clamp(0, wi - 1) as usize, yy.clamp(0, hi - 1) as usize) as f64,
            x as isize,
            y as isize,
            r,
        )
    };
    sxx * syy - sxy * sxy - HARRIS_K * (sxx + syy).powi(2)
}

#[inline(always)]
fn tensor(at: impl Fn(isize, isize) -> f64, x: isize, y: isize, r: isize) -> (f64, f64, f64) {
    let (mut sxx, mut syy, mut sxy) = (0f64, 0f64, 0f64);
    for cy in y - r..=y + r {
        for cx in x - r..=x + r {
            let gx = (at(cx + 1, cy - 1) + 2.0 * at(cx + 1, cy) + at(cx + 1, cy + 1))
                - (at(cx - 1, cy - 1) + 2.0 * at(cx - 1, cy) + at(cx - 1, cy + 1));
            let gy = (at(cx - 1, cy + 1) + 2.0 * at(cx, cy + 1) + at(cx + 1, cy + 1))
                - (at(cx - 1, cy - 1) + 2.0 * at(cx, cy - 1) + at(cx + 1, cy - 1));
            sxx += gx * gx;
            syy += gy * gy;
            sxy += gx * gy;
        }
    }
    (sxx, syy, sxy)
}

/// Scores every corner and returns the `n` best, descending, ties by `(y, x)`.
pub fn harris_rank(img: &GrayImage, corners: &[FastCorner], n: usize) -> Vec<RankedCorner> {
    let mut ranked: Vec<RankedCorner> = corners
        .iter()
        .map(|c| RankedCorner {
            x: c.x,
            y: c.y,
            harris: harris_score(img, c.x, c.y),
        })
        .collect();
    ranked.sort_by(|a, b| b.harris.total_cmp(&a.harris).then((a.y, a.x).cmp(&(b.y, b.x))));
    ranked.truncate(n);
    ranked
}
