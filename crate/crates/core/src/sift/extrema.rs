use super::{ScaleSpace, SiftConfig};
use crate::imgcore::{Keypoint, Plane};

/// Discrete scale-space extremum: DoG level `level` of `octave` at `(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Candidate {
    pub octave: usize,
    pub level: usize,
    pub x: usize,
    pub y: usize,
}

/// Every interior sample of DoG levels `1..=s` strictly above or strictly
/// below all 26 neighbours.
pub fn detect_extrema(ss: &ScaleSpace, _cfg: &SiftConfig) -> Vec<Candidate> {
    let mut out = Vec::new();
    for (o, oct) in ss.octaves.iter().enumerate() {
        let (w, h) = (oct.dogs[0].width, oct.dogs[0].height);
        if w < 3 || h < 3 {
            continue;
        }
        for level in 1..oct.dogs.len() - 1 {
            let (below, cur, above) = (&oct.dogs[level - 1], &oct.dogs[level], &oct.dogs[level + 1]);
            for y in 1..h - 1 {
                for x in 1..w - 1 {
                    let v = cur.data[y * w + x];
                    if is_extremum(v, x, y, w, [below, cur, above]) {
                        out.push(Candidate { octave: o, level, x, y });
                    }
                }
            }
        }
    }
    out
}

#[inline]
fn is_extremum(v: f32, x: usize, y: usize, w: usize, planes: [&Plane; 3]) -> bool {
    let mut greater = true;
    let mut less = true;
    for (pi, p) in planes.iter().enumerate() {
        for yy in y - 1..=y + 1 {
            let row = &p.data[yy * w + x - 1..yy * w + x + 2];
            for (dx, &n) in row.iter().enumerate() {
                if pi == 1 && yy == y && dx == 1 {
                    continue;
                }
                greater &= v > n;
                less &= v < n;
            }
            if !greater && !less {
                return false;
            }
        }
    }
    greater || less
}

/// Finite-difference gradient and Hessian of the DoG at `(x, y, level)`.
pub(crate) fn derivatives(dogs: &[Plane], level: usize, x: usize, y: usize) -> ([f64; 3], [[f64; 3]; 3]) {
    let w = dogs[level].width;
    let at = |l: usize, xx: usize, yy: usize| dogs[l].data[yy * w + xx] as f64;
    let v = at(level, x, y);
    let dx = 0.5 * (at(level, x + 1, y) - at(level, x - 1, y));
    let dy = 0.5 * (at(level, x, y + 1) - at(level, x, y - 1));
    let ds = 0.5 * (at(level + 1, x, y) - at(level - 1, x, y));
    let dxx = at(level, x + 1, y) + at(level, x - 1, y) - 2.0 * v;
    let dyy = at(level, x, y + 1) + at(level, x, y - 1) - 2.0 * v;
    let dss = at(level + 1, x, y) + at(level - 1, x, y) - 2.0 * v;
    let dxy =
        0.25 * (at(level, x + 1, y + 1) - at(level, x - 1, y + 1) - at(level, x + 1, y - 1) + at(level, x - 1, y - 1));
    let dxs =
        0.25 * (at(level + 1, x + 1, y) - at(level + 1, x - 1, y) - at(level - 1, x + 1, y) + at(level - 1, x - 1, y));
    let dys =
        0.25 * (at(level + 1, x, y + 1) - at(level + 1, x, y - 1) - at(level - 1, x, y + 1) + at(level - 1, x, y - 1));
    ([dx, dy, ds], [[dxx, dxy, dxs], [dxy, dyy, dys], [dxs, dys, dss]])
}

/// Solves `h * x = b` by Cramer's rule; `None` when `h` is singular.
pub(crate) fn solve3(h: &[[f64; 3]; 3], b: [f64; 3]) -> Option<[f64; 3]> {
    let det3 = |m: &[[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let det = det3(h);
    if det.abs() < 1e-18 || !det.is_finite() {
        return None;
    }
    let mut out = [0.0; 3];
    for (col, o) in out.iter_mut().enumerate() {
        let mut m = *h;
        for row in 0..3 {
            m[row][col] = b[row];
        }
        *o = det3(&m) / det;
    }
    Some(out)
}

/// Result of refining one candidate, before the orientation stage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Refined {
    pub x: usize,
    pub y: usize,
    pub level: usize,
    pub offset: [f64; 3],
    pub value: f64,
}

pub(crate) enum Rejection {
    Diverged,
    LowContrast,
    Edge,
}

pub(crate) fn refine_one(c: &Candidate, ss: &ScaleSpace, cfg: &SiftConfig) -> Result<Refined, Rejection> {
    let dogs = &ss.octaves[c.octave].dogs;
    let (w, h) = (dogs[0].width, dogs[0].height);
    let s = cfg.scales_per_octave;
    let (mut x, mut y, mut level) = (c.x, c.y, c.level);
    let mut converged = None;
    for _ in 0..cfg.max_refine_iterations {
        let (g, hess) = derivatives(dogs, level, x, y);
        let off = solve3(&hess, [-g[0], -g[1], -g[2]]).ok_or(Rejection::Diverged)?;
        if off.iter().all(|o| o.abs() < 0.5) {
            converged = Some((off, g));
            break;
        }
        let nx = x as f64 + off[0].round();
        let ny = y as f64 + off[1].round();
        let nl = level as f64 + off[2].round();
        if nx < 1.0 || ny < 1.0 || nx > (w - 2) as f64 || ny > (h - 2) as f64 || nl < 1.0 || nl > s as f64 {
            return Err(Rejection::Diverged);
        }
        (x, y, level) = (nx as usize, ny as usize, nl as usize);
    }
    let (offset, g) = converged.ok_or(Rejection::Diverged)?;
    let d = dogs[level].get(x, y) as f64;
    let value = d + 0.5 * (g[0] * offset[0] + g[1] * offset[1] + g[2] * offset[2]);
    if value.abs() < cfg.contrast_threshold {
        return Err(Rejection::LowContrast);
    }
    if !passes_edge_test(&dogs[level], x, y, cfg.edge_ratio) {
        return Err(Rejection::Edge);
    }
    Ok(Refined {
        x,
        y,
        level,
        offset,
        value,
    })
}

/// Principal-curvature test on the 2x2 spatial Hessian of a DoG level.
pub fn passes_edge_test(dog: &Plane, x: usize, y: usize, edge_ratio: f64) -> bool {
    let at = |xx: usize, yy: usize| dog.get(xx, yy) as f64;
    let v = at(x, y);
    let dxx = at(x + 1, y) + at(x - 1, y) - 2.0 * v;
    let dyy = at(x, y + 1) + at(x, y - 1) - 2.0 * v;
    let dxy = 0.25 * (at(x + 1, y + 1) - at(x - 1, y + 1) - at(x + 1, y - 1) + at(x - 1, y - 1));
    let tr = dxx + dyy;
    let det = dxx * dyy - dxy * dxy;
    det > 0.0 && tr * tr / det < (edge_ratio + 1.0).powi(2) / edge_ratio
}

/// Subpixel/subscale refinement with contrast and edge rejection.
pub fn refine_keypoints(cands: &[Candidate], ss: &ScaleSpace, cfg: &SiftConfig) -> Vec<Keypoint> {
    let s = cfg.scales_per_octave as f64;
    cands
        .iter()
        .filter_map(|c| {
            let r = refine_one(c, ss, cfg).ok()?;
            let step = (1u64 << c.octave) as f64;
            let level = r.level as f64 + r.offset[2];
            let mut kp = Keypoint::new(
                ((r.x as f64 + r.offset[0]) * step) as f32,
                ((r.y as f64 + r.offset[1]) * step) as f32,
                (cfg.base_sigma * 2f64.powf(c.octave as f64 + level / s)) as f32,
            );
            kp.response = r.value.abs() as f32;
            kp.octave = c.octave as u32;
            Some(kp)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::super::build_scale_space;
    use super::*;
    use crate::imgcore::{synth, GrayImage};

    #[test]
    fn constant_image_has_no_extrema() {
        let img = GrayImage::filled(64, 64, 12.0).unwrap();
        let cfg = SiftConfig::default();
        let ss = build_scale_space(&img, &cfg).unwrap();
        assert!(detect_extrema(&ss, &cfg).is_empty());
    }

    #[test]
    fn blob_candidate_near_center_and_refined() {
        let img = synth::gaussian_blob(64, 64, 32.0, 32.0, 4.0, 20.0, 220.0);
        let cfg = SiftConfig::default();
        let ss = build_scale_space(&img, &cfg).unwrap();
        let cands = detect_extrema(&ss, &cfg);
        let near: Vec<&Candidate> = cands
            .iter()
            .filter(|c| {
                let step = (1 << c.octave) as f64;
                ((c.x as f64 * step - 32.0).powi(2) + (c.y as f64 * step - 32.0).powi(2)).sqrt() <= 2.0
            })
            .collect();
        assert!(!near.is_empty());

        let kps = refine_keypoints(&cands, &ss, &cfg);
        let best = kps
            .iter()
            .min_by(|a, b| {
                let da = (a.x - 32.0).hypot(a.y - 32.0);
                let db = (b.x - 32.0).hypot(b.y - 32.0);
                da.total_cmp(&db)
            })
            .expect("blob keypoint survives");
        assert!((best.x - 32.0).abs() <= 0.5 * (1 << best.octave) as f32 + 0.5);
        assert!((best.y - 32.0).abs() <= 0.5 * (1 << best.octave) as f32 + 0.5);
    }

    #[test]
    fn step_edge_candidate_fails_edge_test() {
        // A vertical step edge smoothed by the pyramid: the DoG along the edge
        // is nearly constant in y, so the curvature ratio explodes.
        let img = GrayImage::from_fn(64, 64, |x, _| if x < 32 { 40.0 } else { 200.0 }).unwrap();
        let cfg = SiftConfig::default();
        let ss = build_scale_space(&img, &cfg).unwrap();
        let dog = &ss.octaves[0].dogs[1];
        let (x, y) = (33, 32);
        let at = |xx: usize, yy: usize| dog.get(xx, yy) as f64;
        let dxx = at(x + 1, y) + at(x - 1, y) - 2.0 * at(x, y);
        let dyy = at(x, y + 1) + at(x, y - 1) - 2.0 * at(x, y);
        let det = dxx * dyy;
        let ratio_exceeded = det <= 0.0 || (dxx + dyy).powi(2) / det >= 12.1;
        assert!(ratio_exceeded);
        assert!(!passes_edge_test(dog, x, y, cfg.edge_ratio));
        let cand = Candidate {
            octave: 0,
            level: 1,
            x,
            y,
        };
        assert!(refine_keypoints(&[cand], &ss, &cfg).is_empty());
    }

    #[test]
    fn low_contrast_candidate_rejected() {
        // A faint blob: |DoG| stays around 1e-3, well below 0.03.
        let img = synth::gaussian_blob(64, 64, 32.0, 32.0, 3.0, 100.0, 101.0);
        let cfg = SiftConfig::default();
        let ss = build_scale_space(&img, &cfg).unwrap();
        let cands = detect_extrema(&ss, &cfg);
        assert!(!cands.is_empty());
        assert!(refine_keypoints(&cands, &ss, &cfg).is_empty());
    }

    #[test]
    fn solve3_identity() {
        let h = [[2.0, 0.0, 0.0], [0.0, 4.0, 0.0], [0.0, 0.0, 8.0]];
        assert_eq!(solve3(&h, [2.0, 4.0, 8.0]), Some([1.0, 1.0, 1.0]));
        assert_eq!(solve3(&[[0.0; 3]; 3], [1.0, 1.0, 1.0]), None);
    }
}
