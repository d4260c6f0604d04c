//! Brute-force descriptor matching: Euclidean distance with Lowe's ratio test
//! for real-valued descriptors, mutual-best Hamming for binary ones.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::imgcore::{hamming, Descriptor, Keypoint};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchPair {
    pub query: usize,
    pub train: usize,
    pub distance: f32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchConfig {
    /// Accept when `best < ratio * second_best`.
    pub ratio: f32,
    /// Keep only pairs that are nearest neighbours in both directions.
    pub cross_check: bool,
    /// Largest Hamming distance accepted for binary descriptors.
    pub hamming_max: u32,
    /// Skip candidates whose Laplacian signs differ (both nonzero).
    pub respect_laplacian_sign: bool,
}

impl Default for MatchConfig {
    fn default() -> Self {
        Self {
            ratio: 0.75,
            cross_check: true,
            hamming_max: 64,
            respect_laplacian_sign: true,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum MatchError {
    #[error("descriptor kinds differ or lengths disagree ({query} vs {train})")]
    IncompatibleDescriptors { query: usize, train: usize },
    #[error("keypoint and descriptor counts differ ({keypoints} vs {descriptors})")]
    CountMismatch { keypoints: usize, descriptors: usize },
    #[error("ratio must lie in (0, 1], got {0}")]
    InvalidRatio(f32),
    #[error("match rate undefined: both keypoint sets are empty")]
    NoKeypoints,
    #[error("{matches} matches exceed the smaller keypoint count {min}")]
    TooManyMatches { matches: usize, min: usize },
}

fn euclidean(a: &[f32], b: &[f32]) -> f32 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = (*x - *y) as f64;
            d * d
        })
        .sum::<f64>()
        .sqrt() as f32
}

fn signs_compatible(a: i8, b: i8) -> bool {
    a == 0 || b == 0 || a == b
}

/// Nearest and second-nearest distances from `q` into `train`, skipping
/// entries rejected by `allowed`. Ties keep the lower index.
fn two_nearest(
    q: &[f32],
    train: &[&[f32]],
    mut allowed: impl FnMut(usize) -> bool,
) -> Option<(usize, f32, Option<f32>)> {
    let mut best: Option<(usize, f32)> = None;
    let mut second: Option<f32> = None;
    for (j, t) in train.iter().enumerate() {
        if !allowed(j) {
            continue;
        }
        let d = euclidean(q, t);
        match best {
            Some((_, bd)) if d >= bd => {
                if second.is_none_or(|s| d < s) {
                    second = Some(d);
                }
            }
            _ => {
                second = best.map(|(_, bd)| bd);
                best = Some((j, d));
            }
        }
    }
    best.map(|(j, d)| (j, d, second))
}

fn passes_ratio(best: f32, second: Option<f32>, ratio: f32) -> bool {
    match second {
        None => true,
        Some(s) => best < ratio * s,
    }
}

fn real_views(descs: &[Descriptor]) -> Result<Vec<&[f32]>, usize> {
    descs.iter().map(|d| d.as_real().ok_or(d.len())).collect()
}

/// Matches real-valued descriptors. `signs` holds optional Laplacian signs
/// (`kps1`, `kps2`) used for gating when enabled.
pub fn match_real(
    query: &[Descriptor],
    train: &[Descriptor],
    signs: Option<(&[Keypoint], &[Keypoint])>,
    cfg: &MatchConfig,
) -> Result<Vec<MatchPair>, MatchError> {
    if !(cfg.ratio > 0.0 && cfg.ratio <= 1.0) {
        return Err(MatchError::InvalidRatio(cfg.ratio));
    }
    let q = real_views(query).map_err(|l| MatchError::IncompatibleDescriptors { query: l, train: 0 })?;
    let t = real_views(train).map_err(|l| MatchError::IncompatibleDescriptors { query: 0, train: l })?;
    if let (Some(a), Some(b)) = (q.first(), t.first()) {
        if q.iter().any(|d| d.len() != a.len()) || t.iter().any(|d| d.len() != a.len()) {
            return Err(MatchError::IncompatibleDescriptors {
                query: a.len(),
                train: b.len(),
            });
        }
    }
    if let Some((k1, k2)) = signs {
        if k1.len() != q.len() {
            return Err(MatchError::CountMismatch {
                keypoints: k1.len(),
                descriptors: q.len(),
            });
        }
        if k2.len() != t.len() {
            return Err(MatchError::CountMismatch {
                keypoints: k2.len(),
                descriptors: t.len(),
            });
        }
    }
    let gate = |i: usize, j: usize| match signs {
        Some((k1, k2)) if cfg.respect_laplacian_sign => signs_compatible(k1[i].laplacian_sign, k2[j].laplacian_sign),
        _ => true,
    };

    let forward: Vec<Option<(usize, f32, Option<f32>)>> = q
        .iter()
        .enumerate()
        .map(|(i, d)| two_nearest(d, &t, |j| gate(i, j)))
        .collect();

    let mut out = Vec::new();
    if cfg.cross_check {
        let backward: Vec<Option<(usize, f32, Option<f32>)>> = t
            .iter()
            .enumerate()
            .map(|(j, d)| two_nearest(d, &q, |i| gate(i, j)))
            .collect();
        for (i, f) in forward.iter().enumerate() {
            let Some((j, d, s)) = *f else { continue };
            let Some((bi, bd, bs)) = backward[j] else { continue };
            if bi == i && passes_ratio(d, s, cfg.ratio) && passes_ratio(bd, bs, cfg.ratio) {
                out.push(MatchPair {
                    query: i,
                    train: j,
                    distance: d,
                });
            }
        }
    } else {
        let mut by_train: Vec<Option<MatchPair>> = vec![None; t.len()];
        for (i, f) in forward.iter().enumerate() {
            let Some((j, d, s)) = *f else { continue };
            if !passes_ratio(d, s, cfg.ratio) {
                continue;
            }
            if by_train[j].is_none_or(|m| d < m.distance) {
                by_train[j] = Some(MatchPair {
                    query: i,
                    train: j,
                    distance: d,
                });
            }
        }
        out = by_train.into_iter().flatten().collect();
        out.sort_by_key(|m| m.query);
    }
    Ok(out)
}

/// Mutual nearest neighbours under Hamming distance, capped at `hamming_max`.
pub fn match_binary(
    query: &[Descriptor],
    train: &[Descriptor],
    cfg: &MatchConfig,
) -> Result<Vec<MatchPair>, MatchError> {
    let bits = |ds: &[Descriptor]| -> Result<Vec<[u64; 4]>, usize> {
        ds.iter().map(|d| d.as_binary().copied().ok_or(d.len())).collect()
    };
    let q = bits(query).map_err(|l| MatchError::IncompatibleDescriptors { query: l, train: 256 })?;
    let t = bits(train).map_err(|l| MatchError::IncompatibleDescriptors { query: 256, train: l })?;
    let nearest = |a: &[u64; 4], set: &[[u64; 4]]| -> Option<(usize, u32)> {
        let mut best: Option<(usize, u32)> = None;
        for (j, b) in set.iter().enumerate() {
            let d = hamming(a, b);
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((j, d));
            }
        }
        best
    };
    let backward: Vec<Option<(usize, u32)>> = t.iter().map(|d| nearest(d, &q)).collect();
    let mut out = Vec::new();
    for (i, d) in q.iter().enumerate() {
        let Some((j, dist)) = nearest(d, &t) else { continue };
        if dist <= cfg.hamming_max && backward[j].map(|(bi, _)| bi) == Some(i) {
            out.push(MatchPair {
                query: i,
                train: j,
                distance: dist as f32,
            });
        }
    }
    Ok(out)
}

/// Dispatches on descriptor kind; an empty side yields no matches.
pub fn match_descriptors(
    kps1: &[Keypoint],
    d1: &[Descriptor],
    kps2: &[Keypoint],
    d2: &[Descriptor],
    cfg: &MatchConfig,
) -> Result<Vec<MatchPair>, MatchError> {
    let kind = d1.first().or(d2.first());
    match kind {
        None => Ok(Vec::new()),
        Some(Descriptor::Binary(_)) => match_binary(d1, d2, cfg),
        Some(Descriptor::Real(_)) => match_real(d1, d2, Some((kps1, kps2)), cfg),
    }
}

/// Percentage of matched keypoints: `2 m / (k1 + k2) * 100`.
pub fn match_rate(matches: usize, k1: usize, k2: usize) -> Result<f64, MatchError> {
    if k1 == 0 && k2 == 0 {
        return Err(MatchError::NoKeypoints);
    }
    let min = k1.min(k2);
    if matches > min {
        return Err(MatchError::TooManyMatches { matches, min });
    }
    Ok(200.0 * matches as f64 / (k1 + k2) as f64)
}

pub fn dump_matches(matches: &[MatchPair]) -> serde_json::Result<String> {
    serde_json::to_string_pretty(matches)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(v: &[f32]) -> Descriptor {
        Descriptor::Real(v.to_vec())
    }

    #[test]
    fn rate_examples() {
        assert_eq!(match_rate(50, 100, 100).unwrap(), 50.0);
        assert_eq!(match_rate(0, 0, 10).unwrap(), 0.0);
        assert_eq!(match_rate(0, 0, 0), Err(MatchError::NoKeypoints));
        assert!(match_rate(11, 10, 20).is_err());
        assert!((match_rate(1, 1, 2).unwrap() - 200.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn ratio_test_rejects_ambiguous() {
        let q = vec![real(&[0.0, 0.0])];
        let t = vec![real(&[1.0, 0.0]), real(&[0.0, 1.1])];
        let m = match_real(&q, &t, None, &MatchConfig::default()).unwrap();
        assert!(m.is_empty());
        let t = vec![real(&[0.1, 0.0]), real(&[0.0, 1.0])];
        let m = match_real(&q, &t, None, &MatchConfig::default()).unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!((m[0].query, m[0].train), (0, 0));
    }

    #[test]
    fn single_candidate_is_accepted() {
        let q = vec![real(&[0.0, 0.0])];
        let t = vec![real(&[5.0, 5.0])];
        assert_eq!(match_real(&q, &t, None, &MatchConfig::default()).unwrap().len(), 1);
    }

    #[test]
    fn identical_sets_match_fully() {
        let d: Vec<Descriptor> = (0..10).map(|i| real(&[i as f32, (i * i) as f32])).collect();
        let m = match_real(&d, &d, None, &MatchConfig::default()).unwrap();
        assert_eq!(m.len(), 10);
        assert!(m.iter().all(|p| p.query == p.train && p.distance == 0.0));
    }

    #[test]
    fn laplacian_gate() {
        let mut a = Keypoint::new(0.0, 0.0, 1.0);
        a.laplacian_sign = 1;
        let mut b = a;
        b.laplacian_sign = -1;
        let q = vec![real(&[0.0])];
        let t = vec![real(&[0.0])];
        let cfg = MatchConfig::default();
        assert!(match_real(&q, &t, Some((&[a], &[b])), &cfg).unwrap().is_empty());
        let off = MatchConfig {
            respect_laplacian_sign: false,
            ..cfg
        };
        assert_eq!(match_real(&q, &t, Some((&[a], &[b])), &off).unwrap().len(), 1);
    }

    #[test]
    fn binary_mutual_best() {
        let q = vec![Descriptor::Binary([0, 0, 0, 0]), Descriptor::Binary([u64::MAX; 4])];
        let t = vec![Descriptor::Binary([1, 0, 0, 0]), Descriptor::Binary([3, 0, 0, 0])];
        let m = match_binary(&q, &t, &MatchConfig::default()).unwrap();
        assert_eq!(
            m,
            vec![MatchPair {
                query: 0,
                train: 0,
                distance: 1.0
            }]
        );
    }

    #[test]
    fn kinds_must_agree() {
        let q = vec![Descriptor::Binary([0; 4])];
        let t = vec![real(&[0.0])];
        assert!(match_binary(&q, &t, &MatchConfig::default()).is_err());
        assert!(match_real(&t, &q, None, &MatchConfig::default()).is_err());
    }
}
