use super::{level_of, ScaleSpace, SiftConfig, DESCRIPTOR_CLAMP};
use crate::imgcore::{Descriptor, Keypoint};

const GRID: usize = 4;
const ORI_BINS: usize = 8;
const CELL_FACTOR: f64 = 3.0;

/// Descriptors for `kps`, index-aligned. A keypoint whose window carries too
/// little gradient energy for a clamped unit vector gets an all-zero vector;
/// [`super::sift_detect`] drops those keypoints.
pub fn describe(kps: &[Keypoint], ss: &ScaleSpace, _cfg: &SiftConfig) -> Vec<Descriptor> {
    kps.iter()
        .map(|kp| Descriptor::Real(describe_one(kp, ss).unwrap_or_else(|| vec![0.0; GRID * GRID * ORI_BINS])))
        .collect()
}

/// 128-d descriptor, or `None` when the clamped normalization is infeasible.
pub fn describe_one(kp: &Keypoint, ss: &ScaleSpace) -> Option<Vec<f32>> {
    let cfg = SiftConfig {
        scales_per_octave: ss.scales_per_octave,
        base_sigma: ss.level_sigmas[0],
        ..SiftConfig::default()
    };
    let o = kp.octave as usize;
    let oct = ss.octaves.get(o)?;
    let level = level_of(kp, &cfg).round().clamp(0.0, (oct.gaussians.len() - 1) as f64) as usize;
    let img = &oct.gaussians[level];
    let step = (1u64 << o) as f64;
    let (cx, cy) = (kp.x as f64 / step, kp.y as f64 / step);
    let cell = CELL_FACTOR * kp.scale as f64 / step;

    let (sin_t, cos_t) = (kp.orientation as f64).to_radians().sin_cos();
    let half = GRID as f64 / 2.0;
    let radius = (cell * std::f64::consts::SQRT_2 * (GRID as f64 + 1.0) * 0.5).round() as isize;
    let (px, py) = (cx.round() as isize, cy.round() as isize);
    let (w, h) = (img.width as isize, img.height as isize);
    let weight_denom = 2.0 * half * half;

    let mut hist = [0f64; GRID * GRID * ORI_BINS];
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
            let (dx, dy) = (x as f64 - cx, y as f64 - cy);
            // Window coordinates in cell units, u along the keypoint orientation.
            let u = (cos_t * dx + sin_t * dy) / cell;
            let v = (-sin_t * dx + cos_t * dy) / cell;
            let ub = u + half - 0.5;
            let vb = v + half - 0.5;
            if ub <= -1.0 || vb <= -1.0 || ub >= GRID as f64 || vb >= GRID as f64 {
                continue;
            }
            let (xu, yu) = (x as usize, y as usize);
            let gx = (img.get(xu + 1, yu) - img.get(xu - 1, yu)) as f64;
            let gy = (img.get(xu, yu + 1) - img.get(xu, yu - 1)) as f64;
            let mag = (gx * gx + gy * gy).sqrt();
            if mag == 0.0 {
                continue;
            }
            let rel = (gy.atan2(gx).to_degrees() - kp.orientation as f64).rem_euclid(360.0);
            let ob = rel * ORI_BINS as f64 / 360.0;
            let weight = (-(u * u + v * v) / weight_denom).exp();
            accumulate(&mut hist, vb, ub, ob, mag * weight);
        }
    }
    clamp_normalize(&hist, DESCRIPTOR_CLAMP as f64)
}

/// Trilinear vote into (row, col, orientation) with circular orientation bins.
fn accumulate(hist: &mut [f64; GRID * GRID * ORI_BINS], rb: f64, cb: f64, ob: f64, value: f64) {
    let (r0, c0, o0) = (rb.floor(), cb.floor(), ob.floor());
    let (dr, dc, dor) = (rb - r0, cb - c0, ob - o0);
    for (ri, rw) in [(r0 as isize, 1.0 - dr), (r0 as isize + 1, dr)] {
        if ri < 0 || ri >= GRID as isize {
            continue;
        }
        for (ci, cw) in [(c0 as isize, 1.0 - dc), (c0 as isize + 1, dc)] {
            if ci < 0 || ci >= GRID as isize {
                continue;
            }
            for (oi, ow) in [(o0 as isize, 1.0 - dor), (o0 as isize + 1, dor)] {
                let oi = oi.rem_euclid(ORI_BINS as isize) as usize;
                let idx = (ri as usize * GRID + ci as usize) * ORI_BINS + oi;
                hist[idx] += value * rw * cw * ow;
            }
        }
    }
}

/// Unit vector proportional to `v` with every component capped at `cap`.
///
/// This is the fixed point of repeatedly normalizing and clamping: the
/// largest components are pinned to `cap` and the rest share the remaining
/// squared norm. Returns `None` when fewer than `1 / cap^2` components are
/// nonzero, since no such vector exists then.
pub fn clamp_normalize(v: &[f64], cap: f64) -> Option<Vec<f32>> {
    let mut order: Vec<usize> = (0..v.len()).filter(|&i| v[i] > 0.0).collect();
    if (order.len() as f64) * cap * cap < 1.0 - 1e-12 {
        return None;
    }
    order.sort_by(|&a, &b| v[b].total_cmp(&v[a]).then(a.cmp(&b)));
    let mut rest_sq: f64 = order.iter().map(|&i| v[i] * v[i]).sum();
    let mut pinned = 0usize;
    let scale = loop {
        let budget = 1.0 - cap * cap * pinned as f64;
        if budget <= 0.0 || rest_sq <= 0.0 {
            return None;
        }
        let c = (budget / rest_sq).sqrt();
        if pinned < order.len() && c * v[order[pinned]] > cap {
            rest_sq -= v[order[pinned]].powi(2);
            pinned += 1;
        } else {
            break c;
        }
    };
    let mut out = vec![0f32; v.len()];
    for (rank, &i) in order.iter().enumerate() {
        out[i] = if rank < pinned {
            cap as f32
        } else {
            (scale * v[i]) as f32
        };
    }
    Some(out)
}
