//! FAST-9 segment test on the 16-pixel Bresenham circle of radius 3.

use crate::imgcore::GrayImage;

/// Circle offsets in clockwise order starting straight above the centre.
pub const CIRCLE: [(isize, isize); 16] = [
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

pub const BORDER: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FastCorner {
    pub x: usize,
    pub y: usize,
    /// Largest integer threshold at which the pixel is still a corner.
    pub score: i32,
}

/// Best contiguous-arc margin: the largest `m` such that some run of 9
/// circle pixels is entirely brighter than `p + m` or entirely darker than
/// `p - m` (with strict inequalities in the limit).
#[inline]
fn arc_margin(diffs: &[f32; 16]) -> f32 {
    // Minimum over every circular window of 9, built from windows of 2, 4, 8.
    let window_min = |v: [f32; 16]| -> [f32; 16] {
        let step = |a: [f32; 16], k: usize| -> [f32; 16] { std::array::from_fn(|i| a[i].min(a[(i + k) % 16])) };
        let m8 = step(step(step(v, 1), 2), 4);
        std::array::from_fn(|i| m8[i].min(v[(i + 8) % 16]))
    };
    let bright = window_min(*diffs);
    let dark = window_min(diffs.map(|d| -d));
    bright.iter().chain(&dark).fold(f32::NEG_INFINITY, |a, &b| a.max(b))
}

/// True when the 16-bit circular mask holds 9 consecutive set bits.
#[inline]
fn has_run(mask: u32) -> bool {
    let rot = |m: u32, k: u32| ((m << k) | (m >> (16 - k))) & 0xFFFF;
    let m2 = mask & rot(mask, 1);
    let m4 = m2 & rot(m2, 2);
    let m8 = m4 & rot(m4, 4);
    m8 & rot(mask, 8) != 0
}

/// Every pixel at least 3 px from the border that passes the segment test.
pub fn fast_detect(img: &GrayImage, threshold: i32) -> Vec<FastCorner> {
    let (w, h) = (img.width(), img.height());
    if w < 2 * BORDER + 1 || h < 2 * BORDER + 1 {
        return Vec::new();
    }
    let px = img.pixels();
    let t = threshold as f32;
    let offsets: [isize; 16] = CIRCLE.map(|(dx, dy)| dy * w as isize + dx);
    let mut out = Vec::new();
    let span = w - 2 * BORDER;
    let mut candidate = vec![0u8; span];
    for y in BORDER..h - BORDER {
        let row = |dy: usize| &px[(y + dy - BORDER) * w..(y + dy - BORDER + 1) * w];
        let (top, mid, bottom) = (row(0), row(3), row(6));
        // Branch-free pass over the row: any 9-run covers two neighbouring
        // compass pixels (N, E, S, W), so flag pixels with such a pair.
        let centre = &mid[BORDER..w - BORDER];
        let north = &top[BORDER..w - BORDER];
        let south = &bottom[BORDER..w - BORDER];
        let east = &mid[2 * BORDER..];
        let west = &mid[..span];
        for i in 0..span {
            let p = centre[i];
            let (n, e, so, we) = (north[i] - p, east[i] - p, south[i] - p, west[i] - p);
            let (nu, eu, su, wu) = (n > t, e > t, so > t, we > t);
            let (nd, ed, sd, wd) = (n < -t, e < -t, so < -t, we < -t);
            let up = (nu & eu) | (eu & su) | (su & wu) | (wu & nu);
            let down = (nd & ed) | (ed & sd) | (sd & wd) | (wd & nd);
            candidate[i] = (up | down) as u8;
        }
        for x in (BORDER..w - BORDER).filter(|&x| candidate[x - BORDER] != 0) {
            let p = mid[x];
            let idx = (y * w + x) as isize;
            let mut diffs = [0f32; 16];
            let (mut bright, mut dark) = (0u32, 0u32);
            for (k, (d, &off)) in diffs.iter_mut().zip(&offsets).enumerate() {
                *d = px[(idx + off) as usize] - p;
                bright |= ((*d > t) as u32) << k;
                dark |= ((*d < -t) as u32) << k;
            }
            if !has_run(bright) && !has_run(dark) {
                continue;
            }
            let margin = arc_margin(&diffs);
            debug_assert!(margin > t);
            out.push(FastCorner {
                x,
                y,
                score: margin.ceil() as i32 - 1,
            });
        }
    }
    out
}

/// Keeps corners whose score is not beaten by any 8-neighbour; ties keep both.
pub(crate) fn suppress_non_max(corners: &[FastCorner], width: usize, height: usize) -> Vec<FastCorner> {
    let mut grid = vec![i32::MIN; width * height];
    for c in corners {
        grid[c.y * width + c.x] = c.score;
    }
    corners
        .iter()
        .filter(|c| {
            for dy in -1isize..=1 {
                for dx in -1isize..=1 {
                    if dx == 0 && dy == 0 {
                        continue;
                    }
                    let (nx, ny) = (c.x as isize + dx, c.y as isize + dy);
                    if nx < 0 || ny < 0 || nx >= width as isize || ny >= height as isize {
                        continue;
                    }
                    if grid[ny as usize * width + nx as usize] > c.score {
                        return false;
                    }
                }
            }
            true
        })
        .copied()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_and_saturated_threshold() {
        assert!(fast_detect(&GrayImage::filled(20, 20, 80.0).unwrap(), 20).is_empty());
        let img = GrayImage::from_fn(30, 30, |x, y| if (x / 5 + y / 5) % 2 == 0 { 0.0 } else { 255.0 }).unwrap();
        assert!(!fast_detect(&img, 20).is_empty());
        assert!(fast_detect(&img, 255).is_empty());
    }

    #[test]
    fn circle_is_quarter_turn_symmetric() {
        for k in 0..16 {
            let (x, y) = CIRCLE[k];
            // +90 degrees maps (x, y) to (-y, x), four positions further along.
            assert_eq!(CIRCLE[(k + 4) % 16], (-y, x));
        }
    }

    #[test]
    fn nms_keeps_local_best() {
        let cs = [
            FastCorner { x: 5, y: 5, score: 10 },
            FastCorner { x: 6, y: 5, score: 12 },
            FastCorner { x: 9, y: 9, score: 3 },
        ];
        let kept = suppress_non_max(&cs, 12, 12);
        assert_eq!(kept, vec![cs[1], cs[2]]);
    }
}
