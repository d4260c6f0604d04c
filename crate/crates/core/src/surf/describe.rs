use super::orientation::{haar_x, haar_y};
use super::DESCRIPTOR_LEN;
use crate::imgcore::{Descriptor, IntegralImage, Keypoint};

/// Whether every Haar sample of the rotated `20s` window stays inside the image.
pub fn descriptor_window_fits(kp: &Keypoint, width: usize, height: usize) -> bool {
    let s = kp.scale as f64;
    let half_box = (s.round()).max(1.0);
    let reach = 10.0 * std::f64::consts::SQRT_2 * s + half_box + 1.0;
    let (x, y) = (kp.x as f64, kp.y as f64);
    x - reach >= 0.0 && y - reach >= 0.0 && x + reach <= width as f64 && y + reach <= height as f64
}

/// 64-value descriptors: a `20s` window aligned with the keypoint
/// orientation, split into 4x4 subregions of 5x5 Haar samples each,
/// contributing `(sum dx, sum dy, sum |dx|, sum |dy|)`. Normalized to unit
/// length; a window without any response yields the all-zero vector.
pub fn surf_describe(ii: &IntegralImage, kps: &[Keypoint]) -> Vec<Descriptor> {
    kps.iter().map(|kp| Descriptor::Real(describe_one(ii, kp))).collect()
}

fn describe_one(ii: &IntegralImage, kp: &Keypoint) -> Vec<f32> {
    let s = kp.scale as f64;
    let half = (s.round() as isize).max(1);
    let (sin_t, cos_t) = (kp.orientation as f64).to_radians().sin_cos();
    let sigma = 3.3 * s;
    let denom = 2.0 * sigma * sigma;
    let mut desc = [0f64; DESCRIPTOR_LEN];
    for p in 0..4 {
        for q in 0..4 {
            let mut acc = [0f64; 4];
            for b in 0..5 {
                for a in 0..5 {
                    let u = (-10.0 + (5 * q + a) as f64 + 0.5) * s;
                    let v = (-10.0 + (5 * p + b) as f64 + 0.5) * s;
                    let x = (kp.x as f64 + u * cos_t - v * sin_t).round() as isize;
                    let y = (kp.y as f64 + u * sin_t + v * cos_t).round() as isize;
                    let rx = haar_x(ii, x, y, half).unwrap_or(0.0);
                    let ry = haar_y(ii, x, y, half).unwrap_or(0.0);
                    let g = (-(u * u + v * v) / denom).exp();
                    let du = g * (rx * cos_t + ry * sin_t);
                    let dv = g * (-rx * sin_t + ry * cos_t);
                    acc[0] += du;
                    acc[1] += dv;
                    acc[2] += du.abs();
                    acc[3] += dv.abs();
                }
            }
            desc[(p * 4 + q) * 4..(p * 4 + q) * 4 + 4].copy_from_slice(&acc);
        }
    }
    let norm = desc.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 {
        return vec![0.0; DESCRIPTOR_LEN];
    }
    desc.iter().map(|v| (v / norm) as f32).collect()
}
