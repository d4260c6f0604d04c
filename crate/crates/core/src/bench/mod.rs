//! Benchmark harness: runs each (scenario, algorithm) cell, times the
//! detect/describe/match pipeline and reports keypoint and match counts.

mod report;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use thiserror::Error;

use crate::distort::{DistortError, Scenario};
use crate::imgcore::{Descriptor, GrayImage, Keypoint};
use crate::matcher::{match_descriptors, match_rate, MatchConfig, MatchError};
use crate::orb::{orb_detect, OrbConfig, OrbError};
use crate::sift::{sift_detect, SiftConfig, SiftError};
use crate::surf::{surf_extract, SurfConfig, SurfError};

pub use report::{
    emit, metadata_line, parse_csv, parse_sweep_csv, sweep_to_csv, to_csv, to_markdown, OutputFormat, CSV_HEADER,
    SWEEP_HEADER,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algo {
    Sift,
    Surf,
    Orb,
}

impl Algo {
    pub const ALL: [Algo; 3] = [Algo::Sift, Algo::Surf, Algo::Orb];

    pub fn name(self) -> &'static str {
        match self {
            Algo::Sift => "sift",
            Algo::Surf => "surf",
            Algo::Orb => "orb",
        }
    }
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algo {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "sift" => Ok(Algo::Sift),
            "surf" => Ok(Algo::Surf),
            "orb" => Ok(Algo::Orb),
            other => Err(format!("unknown algorithm {other:?} (expected sift, surf or orb)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    /// Seeds the noise scenario.
    pub seed: u64,
    pub repetitions: usize,
    pub intensity_gain: f64,
    pub intensity_bias: f64,
    pub rotation_deg: f64,
    pub scale_factor: f64,
    pub shear_kx: f64,
    pub fisheye_k: f64,
    pub noise_density: f64,
    pub sift: SiftConfig,
    pub surf: SurfConfig,
    pub orb: OrbConfig,
    pub matcher: MatchConfig,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            repetitions: 5,
            intensity_gain: 1.0,
            intensity_bias: 30.0,
            rotation_deg: 45.0,
            scale_factor: 2.0,
            shear_kx: 0.5,
            fisheye_k: 0.5,
            noise_density: 0.3,
            sift: SiftConfig::default(),
            surf: SurfConfig::default(),
            orb: OrbConfig::default(),
            matcher: MatchConfig::default(),
        }
    }
}

pub const DEFAULT_SWEEP_ANGLES: [f64; 7] = [0.0, 45.0, 90.0, 135.0, 180.0, 225.0, 270.0];

impl SuiteConfig {
    pub fn validate(&self) -> Result<(), BenchError> {
        if self.repetitions == 0 {
            return Err(BenchError::InvalidConfig("repetitions must be at least 1".into()));
        }
        for s in self.scenarios() {
            s.validate().map_err(|e| BenchError::InvalidConfig(e.to_string()))?;
        }
        Ok(())
    }

    /// The seven suite scenarios in report order.
    pub fn scenarios(&self) -> Vec<Scenario> {
        vec![
            Scenario::Intensity {
                gain: self.intensity_gain,
                bias: self.intensity_bias,
            },
            Scenario::Rotation {
                angle_deg: self.rotation_deg,
            },
            Scenario::Scaling {
                factor: self.scale_factor,
            },
            Scenario::Shearing { kx: self.shear_kx },
            Scenario::Fisheye { k: self.fisheye_k },
            Scenario::Noise {
                density: self.noise_density,
                seed: self.seed,
            },
            Scenario::Identity,
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioResult {
    pub scenario: Scenario,
    pub algo: Algo,
    pub time_ms: f64,
    pub kpnts1: usize,
    pub kpnts2: usize,
    pub matches: usize,
    /// Rounded to one decimal.
    pub match_rate_pct: f64,
}

#[derive(Debug, Error)]
pub enum CellError {
    #[error(transparent)]
    Distort(#[from] DistortError),
    #[error(transparent)]
    Sift(#[from] SiftError),
    #[error(transparent)]
    Surf(#[from] SurfError),
    #[error(transparent)]
    Orb(#[from] OrbError),
    #[error(transparent)]
    Match(#[from] MatchError),
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("cell {scenario} / {algo}: {source}")]
    Cell {
        scenario: String,
        algo: Algo,
        #[source]
        source: CellError,
    },
    #[error("invalid suite configuration: {0}")]
    InvalidConfig(String),
    #[error("nothing to emit")]
    EmptyResults,
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("malformed results file: {0}")]
    Parse(String),
}

impl BenchError {
    /// True for failures of the computation itself rather than of I/O.
    pub fn is_compute(&self) -> bool {
        matches!(self, BenchError::Cell { .. } | BenchError::InvalidConfig(_))
    }
}

/// Detection plus description for one algorithm.
pub fn extract(img: &GrayImage, algo: Algo, cfg: &SuiteConfig) -> Result<(Vec<Keypoint>, Vec<Descriptor>), CellError> {
    Ok(match algo {
        Algo::Sift => sift_detect(img, &cfg.sift)?,
        Algo::Surf => surf_extract(img, &cfg.surf)?,
        Algo::Orb => orb_detect(img, &cfg.orb)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairCounts {
    pub kpnts1: usize,
    pub kpnts2: usize,
    pub matches: usize,
}

/// One untimed pass: extract from both images and match.
pub fn compare(img1: &GrayImage, img2: &GrayImage, algo: Algo, cfg: &SuiteConfig) -> Result<PairCounts, CellError> {
    let (k1, d1) = extract(img1, algo, cfg)?;
    let (k2, d2) = extract(img2, algo, cfg)?;
    let m = match_descriptors(&k1, &d1, &k2, &d2, &cfg.matcher)?;
    Ok(PairCounts {
        kpnts1: k1.len(),
        kpnts2: k2.len(),
        matches: m.len(),
    })
}

fn rate_pct(c: &PairCounts) -> Result<f64, MatchError> {
    if c.kpnts1 + c.kpnts2 == 0 {
        return Ok(0.0);
    }
    Ok(round1(match_rate(c.matches, c.kpnts1, c.kpnts2)?))
}

pub(crate) fn round1(v: f64) -> f64 {
    (v * 10.0).round() / 10.0
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// Distorts `img`, then times `repetitions` full passes and reports the median.
pub fn run_cell(
    img: &GrayImage,
    scenario: Scenario,
    algo: Algo,
    cfg: &SuiteConfig,
) -> Result<ScenarioResult, BenchError> {
    let wrap = |source: CellError| BenchError::Cell {
        scenario: scenario.to_string(),
        algo,
        source,
    };
    if cfg.repetitions == 0 {
        return Err(BenchError::InvalidConfig("repetitions must be at least 1".into()));
    }
    let img2 = scenario.apply(img).map_err(|e| wrap(e.into()))?;
    let mut times = Vec::with_capacity(cfg.repetitions);
    let mut counts = None;
    for _ in 0..cfg.repetitions {
        let start = Instant::now();
        let c = compare(img, &img2, algo, cfg).map_err(wrap)?;
        times.push(start.elapsed().as_secs_f64() * 1e3);
        counts.get_or_insert(c);
    }
    let c = counts.expect("at least one repetition");
    let match_rate_pct = rate_pct(&c).map_err(|e| wrap(e.into()))?;
    Ok(ScenarioResult {
        scenario,
        algo,
        // Microsecond resolution; finer digits are timer noise.
        time_ms: (median(times) * 1e3).round() / 1e3,
        kpnts1: c.kpnts1,
        kpnts2: c.kpnts2,
        matches: c.matches,
        match_rate_pct,
    })
}

#[derive(Debug, Default)]
pub struct SuiteOutcome {
    pub results: Vec<ScenarioResult>,
    pub failures: Vec<BenchError>,
}

/// All 21 cells in scenario-major order; failing cells are collected and
/// the suite carries on.
pub fn run_suite(img: &GrayImage, cfg: &SuiteConfig) -> Result<SuiteOutcome, BenchError> {
    cfg.validate()?;
    let mut out = SuiteOutcome::default();
    for scenario in cfg.scenarios() {
        for algo in Algo::ALL {
            match run_cell(img, scenario, algo, cfg) {
                Ok(r) => out.results.push(r),
                Err(e) => out.failures.push(e),
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub angle_deg: f64,
    pub algo: Algo,
    pub kpnts1: usize,
    pub kpnts2: usize,
    pub matches: usize,
    pub match_rate_pct: f64,
}

/// Match rate of each algorithm against rotated copies of `img`.
pub fn rotation_sweep(img: &GrayImage, angles: &[f64], cfg: &SuiteConfig) -> Result<Vec<SweepPoint>, BenchError> {
    if angles.is_empty() {
        return Err(BenchError::InvalidConfig("angle list is empty".into()));
    }
    let mut out = Vec::with_capacity(angles.len() * Algo::ALL.len());
    for algo in Algo::ALL {
        let base = extract(img, algo, cfg).map_err(|source| BenchError::Cell {
            scenario: Scenario::Identity.to_string(),
            algo,
            source,
        })?;
        for &angle in angles {
            let scenario = Scenario::Rotation { angle_deg: angle };
            let wrap = |source: CellError| BenchError::Cell {
                scenario: scenario.to_string(),
                algo,
                source,
            };
            let rotated = scenario.apply(img).map_err(|e| wrap(e.into()))?;
            let (k2, d2) = extract(&rotated, algo, cfg).map_err(wrap)?;
            let m = match_descriptors(&base.0, &base.1, &k2, &d2, &cfg.matcher).map_err(|e| wrap(e.into()))?;
            let c = PairCounts {
                kpnts1: base.0.len(),
                kpnts2: k2.len(),
                matches: m.len(),
            };
            out.push(SweepPoint {
                angle_deg: angle,
                algo,
                kpnts1: c.kpnts1,
                kpnts2: c.kpnts2,
                matches: c.matches,
                match_rate_pct: rate_pct(&c).map_err(|e| wrap(e.into()))?,
            });
        }
    }
    out.sort_by(|a, b| a.angle_deg.total_cmp(&b.angle_deg).then(a.algo.cmp(&b.algo)));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn algo_names_round_trip() {
        for a in Algo::ALL {
            assert_eq!(a.name().parse::<Algo>().unwrap(), a);
        }
        assert!("brisk".parse::<Algo>().is_err());
    }

    #[test]
    fn seven_scenarios() {
        let s = SuiteConfig::default().scenarios();
        assert_eq!(s.len(), 7);
        assert_eq!(s[6], Scenario::Identity);
    }

    #[test]
    fn median_of_even_and_odd() {
        assert_eq!(median(vec![3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(vec![4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn zero_repetitions_rejected() {
        let cfg = SuiteConfig {
            repetitions: 0,
            ..SuiteConfig::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn empty_sweep_rejected() {
        let img = GrayImage::filled(64, 64, 0.0).unwrap();
        assert!(rotation_sweep(&img, &[], &SuiteConfig::default()).is_err());
    }
}
