use super::{level_of, ScaleSpace, SiftConfig};
use crate::imgcore::{Keypoint, Plane};

const WINDOW_FACTOR: f64 = 1.5;

/// Gaussian-weighted gradient-orientation histogram around `(cx, cy)` on `img`.
///
/// Bin `i` is centred on `i * 360 / bins` degrees. The raw histogram is
/// smoothed with a circular `[1, 4, 6, 4, 1] / 16` kernel.
pub fn orientation_histogram(img: &Plane, cx: f64, cy: f64, sigma: f64, bins: usize) -> Vec<f64> {
    let radius = (3.0 * sigma).round().max(1.0) as isize;
    let (px, py) = (cx.round() as isize, cy.round() as isize);
    let (w, h) = (img.width as isize, img.height as isize);
    let denom = 2.0 * sigma * sigma;
    let mut hist = vec![0f64; bins];
    for j in -radius..=radius {
        let y = py + j;
        if y < 1 || y >= h - 1 {
            continue;
        }
        for i in -radius..=radius {
            let x = px + i;
            if x < 1 || x >= w - 1 {
                continue;
            }
            let (xu, yu) = (x as usize, y as usize);
            let gx = (img.get(xu + 1, yu) - img.get(xu - 1, yu)) as f64;
            let gy = (img.get(xu, yu + 1) - img.get(xu, yu - 1)) as f64;
            let mag = (gx * gx + gy * gy).sqrt();
            if mag == 0.0 {
                continue;
            }
            let angle = gy.atan2(gx).to_degrees().rem_euclid(360.0);
            let weight = (-((i * i + j * j) as f64) / denom).exp();
            let bin = (angle * bins as f64 / 360.0).round() as usize % bins;
            hist[bin] += weight * mag;
        }
    }
    let n = bins;
    (0..n)
        .map(|i| {
            let at = |d: isize| hist[(i as isize + d).rem_euclid(n as isize) as usize];
            (at(-2) + at(2) + 4.0 * (at(-1) + at(1)) + 6.0 * at(0)) / 16.0
        })
        .collect()
}

/// Orientations (degrees) of every local histogram peak reaching
/// `peak_ratio` of the global maximum, refined by a parabola through the
/// peak bin and its neighbours.
pub fn orientation_peaks(hist: &[f64], peak_ratio: f64) -> Vec<f32> {
    let n = hist.len();
    let max = hist.iter().cloned().fold(0.0, f64::max);
    if max <= 0.0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    for i in 0..n {
        let l = hist[(i + n - 1) % n];
        let c = hist[i];
        let r = hist[(i + 1) % n];
        if c > l && c > r && c >= peak_ratio * max {
            let offset = 0.5 * (l - r) / (l - 2.0 * c + r);
            let angle = ((i as f64 + offset) * 360.0 / n as f64).rem_euclid(360.0);
            // rem_euclid can round up to exactly 360 for tiny negative angles.
            out.push(if angle >= 360.0 { 0.0 } else { angle as f32 });
        }
    }
    out
}

/// One output keypoint per dominant orientation; output count >= input count
/// for keypoints with any gradient energy.
pub fn assign_orientations(kps: &[Keypoint], ss: &ScaleSpace, cfg: &SiftConfig) -> Vec<Keypoint> {
    let mut out = Vec::with_capacity(kps.len() * 5 / 4);
    for kp in kps {
        let o = kp.octave as usize;
        let Some(oct) = ss.octaves.get(o) else { continue };
        let level = level_of(kp, cfg).round().clamp(0.0, (oct.gaussians.len() - 1) as f64) as usize;
        let step = (1u64 << o) as f64;
        let sigma_oct = kp.scale as f64 / step;
        let hist = orientation_histogram(
            &oct.gaussians[level],
            kp.x as f64 / step,
            kp.y as f64 / step,
            WINDOW_FACTOR * sigma_oct,
            cfg.orientation_bins,
        );
        for angle in orientation_peaks(&hist, cfg.peak_ratio) {
            out.push(Keypoint {
                orientation: angle,
                ..*kp
            });
        }
    }
    out
}
