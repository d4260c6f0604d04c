use crate::imgcore::{IntegralImage, Keypoint};

const WINDOW_DEG: f64 = 60.0;
const WINDOW_STEP_DEG: f64 = 5.0;

/// Horizontal Haar response on the `(2 half + 1)`-square centred at
/// `(x, y)`: the `half` columns right of centre minus the `half` columns left
/// of it. The centre column carries no weight, so quarter turns of the image
/// map responses onto each other exactly. `None` if the box leaves the image.
#[inline]
pub fn haar_x(ii: &IntegralImage, x: isize, y: isize, half: isize) -> Option<f64> {
    if !fits(ii, x, y, half) {
        return None;
    }
    let right = ii.rect_sum(x + 1, y - half, x + half, y + half);
    let left = ii.rect_sum(x - half, y - half, x - 1, y + half);
    Some(right - left)
}

/// Vertical Haar response: rows below centre minus rows above.
#[inline]
pub fn haar_y(ii: &IntegralImage, x: isize, y: isize, half: isize) -> Option<f64> {
    if !fits(ii, x, y, half) {
        return None;
    }
    let bottom = ii.rect_sum(x - half, y + 1, x + half, y + half);
    let top = ii.rect_sum(x - half, y - half, x + half, y - 1);
    Some(bottom - top)
}

#[inline]
fn fits(ii: &IntegralImage, x: isize, y: isize, half: isize) -> bool {
    half >= 1 && x - half >= 0 && y - half >= 0 && x + half < ii.width() as isize && y + half < ii.height() as isize
}

/// Dominant Haar-response direction in degrees `[0, 360)`.
///
/// Responses of side `4s` are taken on a grid of step `s` within radius `6s`
/// and weighted by a Gaussian with sigma `2s`. A 60 degree window slides in
/// 5 degree steps; the window with the longest summed vector wins, and on a
/// tie the earlier window start is kept.
pub fn surf_orientation(ii: &IntegralImage, kp: &Keypoint) -> f32 {
    let s = (kp.scale.round() as isize).max(1);
    let (cx, cy) = (kp.x.round() as isize, kp.y.round() as isize);
    let mut responses: Vec<(f64, f64, f64)> = Vec::with_capacity(113);
    for j in -6isize..=6 {
        for i in -6isize..=6 {
            if i * i + j * j >= 36 {
                continue;
            }
            let (x, y) = (cx + i * s, cy + j * s);
            let (Some(dx), Some(dy)) = (haar_x(ii, x, y, 2 * s), haar_y(ii, x, y, 2 * s)) else {
                continue;
            };
            let g = (-((i * i + j * j) as f64) / 8.0).exp();
            let (dx, dy) = (dx * g, dy * g);
            if dx == 0.0 && dy == 0.0 {
                continue;
            }
            responses.push((dy.atan2(dx).to_degrees().rem_euclid(360.0), dx, dy));
        }
    }
    if responses.is_empty() {
        return 0.0;
    }
    let mut best = (-1.0f64, 0.0f64, 0.0f64);
    let mut start = 0.0;
    while start < 360.0 {
        let (mut sx, mut sy) = (0.0, 0.0);
        for &(a, dx, dy) in &responses {
            if (a - start).rem_euclid(360.0) < WINDOW_DEG {
                sx += dx;
                sy += dy;
            }
        }
        let len = sx * sx + sy * sy;
        if len > best.0 {
            best = (len, sx, sy);
        }
        start += WINDOW_STEP_DEG;
    }
    let angle = best.2.atan2(best.1).to_degrees().rem_euclid(360.0);
    if angle >= 360.0 {
        0.0
    } else {
        angle as f32
    }
}
