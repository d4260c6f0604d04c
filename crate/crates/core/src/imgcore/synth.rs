//! Deterministic synthetic scenes used as test and benchmark fixtures.
//!
//! A scene is a smooth background covered by occluding shapes (ellipses,
//! rotated rectangles, triangles, rings) whose sizes follow a power law with
//! density proportional to `r^-3`, the "dead leaves" model whose statistics
//! are scale invariant like those of natural images. Shapes carry a mild
//! linear shading, a few soft blobs are added, and the result is blurred
//! slightly so edges look like a camera image rather than a rasterization.

use super::{GrayImage, Plane};
use crate::rng::SplitMix64;

pub const DEFAULT_SCENE_SEED: u64 = 0x5EED_F00D;

const SHAPES_PER_UNIT: f64 = 47.0;
const MIN_RADIUS: f64 = 1.0;
const MAX_RADIUS_FRACTION: f64 = 0.2;
const CAMERA_BLUR: f64 = 0.6;

/// Cluttered natural-looking scene; content density scales with area.
pub fn scene(width: usize, height: usize, seed: u64) -> GrayImage {
    let mut rng = SplitMix64::new(seed);
    let (w, h) = (width as f64, height as f64);
    let mut canvas = Plane::zeros(width, height);

    let waves: Vec<(f64, f64, f64, f64)> = (0..4)
        .map(|_| {
            (
                rng.range_f64(0.5, 3.0) * std::f64::consts::TAU / w,
                rng.range_f64(0.5, 3.0) * std::f64::consts::TAU / h,
                rng.range_f64(0.0, std::f64::consts::TAU),
                rng.range_f64(8.0, 20.0),
            )
        })
        .collect();
    for y in 0..height {
        for x in 0..width {
            let v: f64 = waves
                .iter()
                .map(|&(fx, fy, ph, amp)| amp * (fx * x as f64 + fy * y as f64 + ph).sin())
                .sum();
            canvas.set(x, y, (120.0 + v) as f32);
        }
    }

    let area_units = (w * h) / (64.0 * 64.0);
    let n_shapes = (area_units * SHAPES_PER_UNIT).round() as usize;
    let (r_min, r_max) = (MIN_RADIUS, (w.min(h) * MAX_RADIUS_FRACTION).max(MIN_RADIUS * 2.0));
    for _ in 0..n_shapes {
        let u = rng.next_f64();
        // Inverse CDF of the r^-3 size density on [r_min, r_max].
        let size = (r_min.powi(-2) - u * (r_min.powi(-2) - r_max.powi(-2))).powf(-0.5);
        let cx = rng.range_f64(-size, w + size);
        let cy = rng.range_f64(-size, h + size);
        let value = rng.range_f64(20.0, 235.0) as f32;
        let (gx, gy) = (rng.range_f64(-0.5, 0.5) as f32, rng.range_f64(-0.5, 0.5) as f32);
        let shade = move |dx: f64, dy: f64| value + gx * dx as f32 + gy * dy as f32;
        let angle = rng.range_f64(0.0, std::f64::consts::PI);
        let (s, c) = angle.sin_cos();
        match rng.below(4) {
            0 => {
                let (a, b) = (size, size * rng.range_f64(0.35, 0.8));
                paint(&mut canvas, cx, cy, size * 1.1, shade, |dx, dy| {
                    let u = c * dx + s * dy;
                    let v = -s * dx + c * dy;
                    (u / a).powi(2) + (v / b).powi(2) <= 1.0
                });
            }
            1 => {
                let (a, b) = (size, size * rng.range_f64(0.3, 1.0));
                paint(&mut canvas, cx, cy, size * 1.5, shade, |dx, dy| {
                    let u = c * dx + s * dy;
                    let v = -s * dx + c * dy;
                    u.abs() <= a && v.abs() <= b
                });
            }
            2 => {
                let verts: Vec<(f64, f64)> = (0..3)
                    .map(|k| {
                        let t = angle + k as f64 * 2.1 + rng.range_f64(-0.4, 0.4);
                        let r = size * rng.range_f64(0.6, 1.3);
                        (r * t.cos(), r * t.sin())
                    })
                    .collect();
                paint(&mut canvas, cx, cy, size * 1.4, shade, |dx, dy| {
                    inside_triangle(&verts, dx, dy)
                });
            }
            _ => {
                let outer = size;
                let inner = size * rng.range_f64(0.4, 0.7);
                paint(&mut canvas, cx, cy, size * 1.1, shade, |dx, dy| {
                    let u = c * dx + s * dy;
                    let v = (-s * dx + c * dy) * 1.25;
                    let r2 = u * u + v * v;
                    r2 <= outer * outer && r2 >= inner * inner
                });
            }
        }
    }

    let n_blobs = (area_units * 1.5).round() as usize;
    for _ in 0..n_blobs {
        let cx = rng.range_f64(0.0, w);
        let cy = rng.range_f64(0.0, h);
        let sigma = rng.range_f64(1.5, 5.0);
        let amp = rng.range_f64(-90.0, 90.0);
        let r = (3.0 * sigma).ceil() as isize;
        for dy in -r..=r {
            for dx in -r..=r {
                let (x, y) = (cx as isize + dx, cy as isize + dy);
                if x < 0 || y < 0 || x >= width as isize || y >= height as isize {
                    continue;
                }
                let (fx, fy) = (x as f64 - cx, y as f64 - cy);
                let g = amp * (-(fx * fx + fy * fy) / (2.0 * sigma * sigma)).exp();
                let (xu, yu) = (x as usize, y as usize);
                canvas.set(xu, yu, canvas.get(xu, yu) + g as f32);
            }
        }
    }

    let blurred = canvas.gaussian_blur(CAMERA_BLUR);
    let quantized: Vec<f32> = blurred.data.iter().map(|&v| v.clamp(0.0, 255.0).round()).collect();
    GrayImage::from_clamped(width, height, quantized)
}

fn paint(
    canvas: &mut Plane,
    cx: f64,
    cy: f64,
    reach: f64,
    shade: impl Fn(f64, f64) -> f32,
    inside: impl Fn(f64, f64) -> bool,
) {
    let r = reach.ceil() as isize + 1;
    let (w, h) = (canvas.width as isize, canvas.height as isize);
    let (x0, y0) = (cx.round() as isize, cy.round() as isize);
    for y in (y0 - r).max(0)..(y0 + r + 1).min(h) {
        for x in (x0 - r).max(0)..(x0 + r + 1).min(w) {
            let (dx, dy) = (x as f64 - cx, y as f64 - cy);
            if inside(dx, dy) {
                canvas.set(x as usize, y as usize, shade(dx, dy));
            }
        }
    }
}

fn inside_triangle(v: &[(f64, f64)], px: f64, py: f64) -> bool {
    let cross = |a: (f64, f64), b: (f64, f64)| (b.0 - a.0) * (py - a.1) - (b.1 - a.1) * (px - a.0);
    let d1 = cross(v[0], v[1]);
    let d2 = cross(v[1], v[2]);
    let d3 = cross(v[2], v[0]);
    let neg = d1 < 0.0 || d2 < 0.0 || d3 < 0.0;
    let pos = d1 > 0.0 || d2 > 0.0 || d3 > 0.0;
    !(neg && pos)
}

/// Isotropic Gaussian blob of standard deviation `sigma` centred at `(cx, cy)`.
pub fn gaussian_blob(
    width: usize,
    height: usize,
    cx: f64,
    cy: f64,
    sigma: f64,
    background: f32,
    peak: f32,
) -> GrayImage {
    GrayImage::from_fn(width, height, |x, y| {
        let (dx, dy) = (x as f64 - cx, y as f64 - cy);
        let g = (-(dx * dx + dy * dy) / (2.0 * sigma * sigma)).exp();
        background + (peak - background) * g as f32
    })
    .expect("non-empty blob image")
}
