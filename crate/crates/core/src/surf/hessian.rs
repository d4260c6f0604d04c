use super::{SurfConfig, SurfError};
use crate::imgcore::{GrayImage, IntegralImage, Keypoint};
use crate::sift::solve3;

/// Box-filter approximation of the scale-normalized Hessian at one pixel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HessianResponse {
    pub dxx: f64,
    pub dyy: f64,
    pub dxy: f64,
    /// `dxx * dyy - (w * dxy)^2`.
    pub det: f64,
    /// Sign of `dxx + dyy`.
    pub trace_sign: i8,
}

/// Filter side for `level` of `octave`: 9, 15, 21, 27 / 15, 27, 39, 51 / ...
///
/// Sizes grow by `2 * base / 3` in the first octave and the increment doubles
/// every octave; each octave starts at the second size of the previous one.
pub fn filter_size(base_filter: usize, octave: usize, level: usize) -> usize {
    let increment = |o: usize| (2 * base_filter / 3) << o;
    let first: usize = base_filter + (0..octave).map(increment).sum::<usize>();
    first + increment(octave) * level
}

/// Raw weighted box sums `(Dxx, Dyy, Dxy)` on 0..255 intensities, unnormalized.
#[inline]
pub(crate) fn raw_derivatives(ii: &IntegralImage, x: isize, y: isize, filter: usize) -> (f64, f64, f64) {
    let l = (filter / 3) as isize;
    let b = (filter as isize - 1) / 2;
    let hl = (l - 1) / 2;

    // Dyy: three lobes stacked vertically, 2l-1 wide.
    let full_v = ii.rect_sum(x - (l - 1), y - b, x + (l - 1), y + b);
    let mid_v = ii.rect_sum(x - (l - 1), y - hl, x + (l - 1), y + hl);
    let dyy = full_v - 3.0 * mid_v;
    // Dxx: the transpose.
    let full_h = ii.rect_sum(x - b, y - (l - 1), x + b, y + (l - 1));
    let mid_h = ii.rect_sum(x - hl, y - (l - 1), x + hl, y + (l - 1));
    let dxx = full_h - 3.0 * mid_h;
    // Dxy: four l x l quadrants separated by a one-pixel cross.
    let tl = ii.rect_sum(x - l, y - l, x - 1, y - 1);
    let tr = ii.rect_sum(x + 1, y - l, x + l, y - 1);
    let bl = ii.rect_sum(x - l, y + 1, x - 1, y + l);
    let br = ii.rect_sum(x + 1, y + 1, x + l, y + l);
    let dxy = tl + br - tr - bl;
    (dxx, dyy, dxy)
}

#[inline]
fn response_unchecked(ii: &IntegralImage, x: isize, y: isize, filter: usize, cross_weight: f64) -> HessianResponse {
    let (dxx, dyy, dxy) = raw_derivatives(ii, x, y, filter);
    let norm = 1.0 / (255.0 * (filter * filter) as f64);
    let (dxx, dyy, dxy) = (dxx * norm, dyy * norm, dxy * norm);
    let trace = dxx + dyy;
    HessianResponse {
        dxx,
        dyy,
        dxy,
        det: dxx * dyy - (cross_weight * dxy).powi(2),
        trace_sign: if trace > 0.0 {
            1
        } else if trace < 0.0 {
            -1
        } else {
            0
        },
    }
}

/// Hessian response with the default 0.9 cross-term weight.
pub fn hessian_response(
    ii: &IntegralImage,
    x: usize,
    y: usize,
    filter_size: usize,
) -> Result<HessianResponse, SurfError> {
    let b = (filter_size - 1) / 2;
    if filter_size < 3 || filter_size.is_multiple_of(2) || x < b || y < b || x + b >= ii.width() || y + b >= ii.height()
    {
        return Err(SurfError::FootprintOutOfBounds {
            x,
            y,
            filter: filter_size,
            width: ii.width(),
            height: ii.height(),
        });
    }
    Ok(response_unchecked(ii, x as isize, y as isize, filter_size, 0.9))
}

/// Determinant responses of one octave on a shared sampling lattice.
#[derive(Debug, Clone)]
pub struct ResponseLattice {
    pub octave: usize,
    pub step: usize,
    pub filters: Vec<usize>,
    /// Pixel coordinates of lattice columns and rows.
    pub xs: Vec<usize>,
    pub ys: Vec<usize>,
    /// `det[level][row * xs.len() + col]`.
    pub det: Vec<Vec<f64>>,
    pub sign: Vec<Vec<i8>>,
}

impl ResponseLattice {
    #[inline]
    pub fn at(&self, level: usize, col: usize, row: usize) -> f64 {
        self.det[level][row * self.xs.len() + col]
    }
}

/// Lattice positions are multiples of the octave stride where the octave's
/// largest filter fits. Returns `None` if fewer than 3x3 positions remain.
pub fn build_lattice(ii: &IntegralImage, cfg: &SurfConfig, octave: usize) -> Option<ResponseLattice> {
    let step = cfg.base_step << octave;
    let filters: Vec<usize> = (0..cfg.levels_per_octave)
        .map(|l| filter_size(cfg.base_filter, octave, l))
        .collect();
    let b = (filters[filters.len() - 1] - 1) / 2;
    let axis = |len: usize| -> Vec<usize> {
        if len <= 2 * b {
            return Vec::new();
        }
        let first = b.div_ceil(step) * step;
        (first..len - b).step_by(step).collect()
    };
    let xs = axis(ii.width());
    let ys = axis(ii.height());
    if xs.len() < 3 || ys.len() < 3 {
        return None;
    }
    let mut det = Vec::with_capacity(filters.len());
    let mut sign = Vec::with_capacity(filters.len());
    for &f in &filters {
        let mut d = Vec::with_capacity(xs.len() * ys.len());
        let mut s = Vec::with_capacity(xs.len() * ys.len());
        for &y in &ys {
            for &x in &xs {
                let r = response_unchecked(ii, x as isize, y as isize, f, cfg.cross_weight);
                d.push(r.det);
                s.push(r.trace_sign);
            }
        }
        det.push(d);
        sign.push(s);
    }
    Some(ResponseLattice {
        octave,
        step,
        filters,
        xs,
        ys,
        det,
        sign,
    })
}

/// `(level, col, row)` of every lattice sample above `threshold` that is
/// strictly greater than its 26 neighbours, for the inner levels.
pub fn lattice_maxima(lat: &ResponseLattice, threshold: f64) -> Vec<(usize, usize, usize)> {
    let (cols, rows) = (lat.xs.len(), lat.ys.len());
    let mut out = Vec::new();
    for level in 1..lat.filters.len() - 1 {
        for row in 1..rows - 1 {
            'cols: for col in 1..cols - 1 {
                let v = lat.at(level, col, row);
                if v <= threshold {
                    continue;
                }
                for dl in [level - 1, level, level + 1] {
                    for r in row - 1..=row + 1 {
                        for c in col - 1..=col + 1 {
                            if (dl, r, c) != (level, row, col) && lat.at(dl, c, r) >= v {
                                continue 'cols;
                            }
                        }
                    }
                }
                out.push((level, col, row));
            }
        }
    }
    out
}

fn interpolate(lat: &ResponseLattice, level: usize, col: usize, row: usize) -> Option<[f64; 3]> {
    let at = |l: usize, c: usize, r: usize| lat.at(l, c, r);
    let v = at(level, col, row);
    let dx = 0.5 * (at(level, col + 1, row) - at(level, col - 1, row));
    let dy = 0.5 * (at(level, col, row + 1) - at(level, col, row - 1));
    let ds = 0.5 * (at(level + 1, col, row) - at(level - 1, col, row));
    let dxx = at(level, col + 1, row) + at(level, col - 1, row) - 2.0 * v;
    let dyy = at(level, col, row + 1) + at(level, col, row - 1) - 2.0 * v;
    let dss = at(level + 1, col, row) + at(level - 1, col, row) - 2.0 * v;
    let dxy = 0.25
        * (at(level, col + 1, row + 1) - at(level, col - 1, row + 1) - at(level, col + 1, row - 1)
            + at(level, col - 1, row - 1));
    let dxs = 0.25
        * (at(level + 1, col + 1, row) - at(level + 1, col - 1, row) - at(level - 1, col + 1, row)
            + at(level - 1, col - 1, row));
    let dys = 0.25
        * (at(level + 1, col, row + 1) - at(level + 1, col, row - 1) - at(level - 1, col, row + 1)
            + at(level - 1, col, row - 1));
    let h = [[dxx, dxy, dxs], [dxy, dyy, dys], [dxs, dys, dss]];
    let off = solve3(&h, [-dx, -dy, -ds])?;
    off.iter().all(|o| o.abs() < 0.5).then_some(off)
}

/// Interest points (orientation 0) from the determinant lattice.
pub fn surf_detect(img: &GrayImage, cfg: &SurfConfig) -> Result<Vec<Keypoint>, SurfError> {
    surf_detect_integral(&IntegralImage::new(img), cfg)
}

pub(crate) fn surf_detect_integral(ii: &IntegralImage, cfg: &SurfConfig) -> Result<Vec<Keypoint>, SurfError> {
    cfg.validate()?;
    let mut out = Vec::new();
    for octave in 0..cfg.octaves {
        let Some(lat) = build_lattice(ii, cfg, octave) else {
            if octave == 0 {
                return Err(SurfError::ImageTooSmall {
                    width: ii.width(),
                    height: ii.height(),
                });
            }
            break;
        };
        for (level, col, row) in lattice_maxima(&lat, cfg.hessian_threshold) {
            let Some(off) = interpolate(&lat, level, col, row) else {
                continue;
            };
            let x = lat.xs[col] as f64 + off[0] * lat.step as f64;
            let y = lat.ys[row] as f64 + off[1] * lat.step as f64;
            let filter_step = (lat.filters[1] - lat.filters[0]) as f64;
            let size = lat.filters[level] as f64 + off[2] * filter_step;
            let mut kp = Keypoint::new(x as f32, y as f32, (1.2 * size / 9.0) as f32);
            kp.response = lat.at(level, col, row) as f32;
            kp.octave = octave as u32;
            kp.laplacian_sign = lat.sign[level][row * lat.xs.len() + col];
            out.push(kp);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn filter_ladder() {
        let sizes: Vec<Vec<usize>> = (0..4).map(|o| (0..4).map(|l| filter_size(9, o, l)).collect()).collect();
        assert_eq!(sizes[0], vec![9, 15, 21, 27]);
        assert_eq!(sizes[1], vec![15, 27, 39, 51]);
        assert_eq!(sizes[2], vec![27, 51, 75, 99]);
        assert_eq!(sizes[3], vec![51, 99, 147, 195]);
    }

    #[test]
    fn constant_image_zero_response() {
        let ii = IntegralImage::new(&GrayImage::filled(40, 40, 93.0).unwrap());
        let r = hessian_response(&ii, 20, 20, 15).unwrap();
        assert_eq!(r.det, 0.0);
        assert_eq!(r.trace_sign, 0);
    }

    #[test]
    fn footprint_checks() {
        let ii = IntegralImage::new(&GrayImage::filled(20, 20, 0.0).unwrap());
        assert!(hessian_response(&ii, 4, 4, 9).is_ok());
        assert!(hessian_response(&ii, 3, 10, 9).is_err());
        assert!(hessian_response(&ii, 15, 16, 9).is_err());
    }

    #[test]
    fn too_small() {
        let img = GrayImage::filled(20, 20, 5.0).unwrap();
        assert!(matches!(
            surf_detect(&img, &SurfConfig::default()),
            Err(SurfError::ImageTooSmall { .. })
        ));
    }
}
