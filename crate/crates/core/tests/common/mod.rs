//! Brute-force reference implementations shared by the integration tests.
//! Each one is written for clarity, never for speed, and shares no code with
//! the library beyond the image container.

#![allow(dead_code)]

use featbench_core::imgcore::{synth, Plane};
use featbench_core::GrayImage;

pub const CIRCLE: [(i64, i64); 16] = [
    (0, -3),
    (1, -3),
    (2, -2),
    (3, -1),
    (3, 0),
    (3, 1),
    (2, 2),
    (1, 3),
    (0, 3),
    (-1, 3),
    (-2, 2),
    (-3, 1),
    (-3, 0),
    (-3, -1),
    (-2, -2),
    (-1, -3),
];

/// Default scene used by the slow suites.
pub fn reference_scene() -> GrayImage {
    synth::scene(512, 512, synth::DEFAULT_SCENE_SEED)
}

/// Deterministic white-noise image, good for stressing detectors.
pub fn noise_image(width: usize, height: usize, seed: u64) -> GrayImage {
    let mut state = seed;
    GrayImage::from_fn(width, height, |_, _| {
        // xorshift64*, independent from the library generator.
        state ^= state >> 12;
        state ^= state << 25;
        state ^= state >> 27;
        (state.wrapping_mul(0x2545_F491_4F6C_DD1D) >> 56) as f32
    })
    .unwrap()
}

pub fn box_sum_loop(img: &GrayImage, x0: usize, y0: usize, x1: usize, y1: usize) -> f64 {
    let mut s = 0.0;
    for y in y0..=y1 {
        for x in x0..=x1 {
            s += img.get(x, y) as f64;
        }
    }
    s
}

/// Dense 2-D Gaussian convolution with replicated borders. The kernel is the
/// outer product of the sampled 1-D Gaussian of radius `ceil(3 sigma)`.
pub fn dense_blur(w: usize, h: usize, src: &[f64], sigma: f64) -> Vec<f64> {
    let r = (3.0 * sigma).ceil().max(1.0) as i64;
    let g: Vec<f64> = (-r..=r)
        .map(|i| (-((i * i) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let norm: f64 = g.iter().sum();
    let mut out = vec![0.0; w * h];
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            let mut acc = 0.0;
            for j in -r..=r {
                for i in -r..=r {
                    let sx = (x + i).clamp(0, w as i64 - 1) as usize;
                    let sy = (y + j).clamp(0, h as i64 - 1) as usize;
                    acc += g[(i + r) as usize] * g[(j + r) as usize] / (norm * norm) * src[sy * w + sx];
                }
            }
            out[y as usize * w + x as usize] = acc;
        }
    }
    out
}

/// Exhaustive FAST-9: tries every start position of a 9-long arc.
pub fn fast_exhaustive(img: &GrayImage, threshold: f32) -> Vec<(usize, usize)> {
    let (w, h) = (img.width(), img.height());
    let mut out = Vec::new();
    for y in 3..h - 3 {
        for x in 3..w - 3 {
            let p = img.get(x, y);
            let ring: Vec<f32> = CIRCLE
                .iter()
                .map(|&(dx, dy)| img.get((x as i64 + dx) as usize, (y as i64 + dy) as usize))
                .collect();
            let arc = |pred: &dyn Fn(f32) -> bool| (0..16).any(|s| (0..9).all(|k| pred(ring[(s + k) % 16])));
            if arc(&|v| v > p + threshold) || arc(&|v| v < p - threshold) {
                out.push((x, y));
            }
        }
    }
    out
}

/// Largest integer threshold at which the exhaustive test still fires.
pub fn fast_score_exhaustive(img: &GrayImage, x: usize, y: usize) -> i32 {
    let single = GrayImage::from_fn(7, 7, |i, j| img.get(x + i - 3, y + j - 3)).unwrap();
    let mut best = -1;
    for t in 0..=255 {
        if fast_exhaustive(&single, t as f32).is_empty() {
            break;
        }
        best = t;
    }
    best
}

/// Every interior sample of the middle planes strictly above or below all 26
/// neighbours in the 3x3x3 cube.
pub fn extrema_exhaustive(dogs: &[Plane]) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    let (w, h) = (dogs[0].width, dogs[0].height);
    for level in 1..dogs.len() - 1 {
        for y in 1..h - 1 {
            for x in 1..w - 1 {
                let v = dogs[level].get(x, y);
                let mut neighbours = Vec::with_capacity(26);
                for dl in [-1i64, 0, 1] {
                    for dy in [-1i64, 0, 1] {
                        for dx in [-1i64, 0, 1] {
                            if dl == 0 && dy == 0 && dx == 0 {
                                continue;
                            }
                            let plane = &dogs[(level as i64 + dl) as usize];
                            neighbours.push(plane.get((x as i64 + dx) as usize, (y as i64 + dy) as usize));
                        }
                    }
                }
                if neighbours.iter().all(|&n| v > n) || neighbours.iter().all(|&n| v < n) {
                    out.push((level, x, y));
                }
            }
        }
    }
    out
}

pub fn hamming_loop(a: &[u64; 4], b: &[u64; 4]) -> u32 {
    let mut d = 0;
    for i in 0..256 {
        let bit = |w: &[u64; 4]| (w[i / 64] >> (i % 64)) & 1;
        if bit(a) != bit(b) {
            d += 1;
        }
    }
    d
}

/// Harris measure from its definition: Sobel gradients, 7x7 window,
/// replicated borders, k = 0.04.
pub fn harris_reference(img: &GrayImage, x: usize, y: usize) -> f64 {
    let (w, h) = (img.width() as i64, img.height() as i64);
    let at = |i: i64, j: i64| img.get(i.clamp(0, w - 1) as usize, j.clamp(0, h - 1) as usize) as f64;
    let sobel_x = [[-1.0, 0.0, 1.0], [-2.0, 0.0, 2.0], [-1.0, 0.0, 1.0]];
    let (mut a, mut b, mut c) = (0.0, 0.0, 0.0);
    for cy in y as i64 - 3..=y as i64 + 3 {
        for cx in x as i64 - 3..=x as i64 + 3 {
            let (mut gx, mut gy) = (0.0, 0.0);
            for (j, row) in sobel_x.iter().enumerate() {
                for (i, &weight) in row.iter().enumerate() {
                    let v = at(cx + i as i64 - 1, cy + j as i64 - 1);
                    gx += weight * v;
                    // The y kernel is the transpose of the x kernel.
                    gy += sobel_x[i][j] * v;
                }
            }
            a += gx * gx;
            b += gy * gy;
            c += gx * gy;
        }
    }
    a * b - c * c - 0.04 * (a + b) * (a + b)
}

/// SURF box-filter second derivatives by explicit per-pixel weights, on raw
/// 0..255 values: `(Dxx, Dyy, Dxy)`.
pub fn surf_derivatives_loop(img: &GrayImage, x: usize, y: usize, filter: usize) -> (f64, f64, f64) {
    let l = (filter / 3) as i64;
    let b = (filter as i64 - 1) / 2;
    let (x, y) = (x as i64, y as i64);
    let (mut dxx, mut dyy, mut dxy) = (0.0, 0.0, 0.0);
    for j in -b..=b {
        for i in -b..=b {
            let v = img.get((x + i) as usize, (y + j) as usize) as f64;
            // Three stacked lobes, the middle one weighted -2.
            if j.abs() < l {
                dxx += if i.abs() <= (l - 1) / 2 { -2.0 } else { 1.0 } * v;
            }
            if i.abs() < l {
                dyy += if j.abs() <= (l - 1) / 2 { -2.0 } else { 1.0 } * v;
            }
            if i != 0 && j != 0 && i.abs() <= l && j.abs() <= l {
                dxy += if (i > 0) == (j > 0) { 1.0 } else { -1.0 } * v;
            }
        }
    }
    (dxx, dyy, dxy)
}

/// Match rate by definition: `200 * matches / (k1 + k2)`.
pub fn rate_reference(matches: u32, k1: u32, k2: u32) -> f64 {
    200.0 * matches as f64 / (k1 + k2) as f64
}

pub mod checks {
    //! Oracle comparisons returning a description of the first mismatch.

    use super::*;
    use featbench_core::imgcore::{hamming, IntegralImage};
    use featbench_core::orb::fast_detect;
    use featbench_core::sift::{build_scale_space, detect_extrema, SiftConfig};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    pub type Check = Result<(), String>;

    pub fn box_sums(trials: usize) -> Check {
        let mut rng = StdRng::seed_from_u64(7);
        for t in 0..trials {
            let (w, h) = (rng.gen_range(1..48), rng.gen_range(1..48));
            // Integer pixels keep every partial sum exact in f64.
            let img = GrayImage::from_fn(w, h, |_, _| rng.gen_range(0..=255) as f32).unwrap();
            let ii = IntegralImage::new(&img);
            let (xa, xb) = (rng.gen_range(0..w), rng.gen_range(0..w));
            let (ya, yb) = (rng.gen_range(0..h), rng.gen_range(0..h));
            let (x0, x1, y0, y1) = (xa.min(xb), xa.max(xb), ya.min(yb), ya.max(yb));
            let got = ii.box_sum(x0, y0, x1, y1).map_err(|e| e.to_string())?;
            let want = box_sum_loop(&img, x0, y0, x1, y1);
            if got != want {
                return Err(format!(
                    "trial {t}: box ({x0},{y0})-({x1},{y1}) gave {got}, loop gave {want}"
                ));
            }
        }
        Ok(())
    }

    /// Worst per-pixel deviation of the separable blur from the dense
    /// convolution over unit impulses on a 15x15 grid.
    pub fn blur_impulses(sigmas: &[f64]) -> Result<f64, String> {
        let n = 15;
        let mut worst = 0f64;
        for &sigma in sigmas {
            for &(px, py) in &[(7, 7), (0, 0), (14, 3), (2, 12), (14, 14)] {
                let mut plane = Plane::zeros(n, n);
                plane.data[py * n + px] = 1.0;
                let got = plane.gaussian_blur(sigma);
                let src: Vec<f64> = plane.data.iter().map(|&v| v as f64).collect();
                let want = dense_blur(n, n, &src, sigma);
                for (g, w) in got.data.iter().zip(&want) {
                    worst = worst.max((*g as f64 - w).abs());
                }
            }
        }
        Ok(worst)
    }

    pub fn fast_sets(img: &GrayImage, threshold: i32) -> Check {
        let mut got: Vec<(usize, usize)> = fast_detect(img, threshold).iter().map(|c| (c.x, c.y)).collect();
        got.sort_unstable();
        let mut want = fast_exhaustive(img, threshold as f32);
        want.sort_unstable();
        if got != want {
            let extra: Vec<_> = got.iter().filter(|p| !want.contains(p)).take(5).collect();
            let missing: Vec<_> = want.iter().filter(|p| !got.contains(p)).take(5).collect();
            return Err(format!(
                "{} vs {} corners; extra {extra:?}, missing {missing:?}",
                got.len(),
                want.len()
            ));
        }
        Ok(())
    }

    pub fn dog_extrema(img: &GrayImage) -> Result<usize, String> {
        let cfg = SiftConfig {
            octaves: 2,
            ..SiftConfig::default()
        };
        let ss = build_scale_space(img, &cfg).map_err(|e| e.to_string())?;
        let found = detect_extrema(&ss, &cfg);
        let mut total = 0;
        for (o, oct) in ss.octaves.iter().enumerate() {
            let mut got: Vec<_> = found
                .iter()
                .filter(|c| c.octave == o)
                .map(|c| (c.level, c.x, c.y))
                .collect();
            got.sort_unstable();
            let mut want = extrema_exhaustive(&oct.dogs);
            want.sort_unstable();
            if got != want {
                return Err(format!(
                    "octave {o}: {} extrema vs {} from the exhaustive scan",
                    got.len(),
                    want.len()
                ));
            }
            total += want.len();
        }
        Ok(total)
    }

    pub fn hamming_distances(trials: usize) -> Check {
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..trials {
            let a: [u64; 4] = rng.gen();
            let mut b: [u64; 4] = rng.gen();
            if rng.gen_bool(0.2) {
                b = a;
            }
            let (got, want) = (hamming(&a, &b), hamming_loop(&a, &b));
            if got != want {
                return Err(format!("{a:?} vs {b:?}: {got} != {want}"));
            }
        }
        Ok(())
    }
}
