//! End-to-end behaviour of the detectors and the benchmark harness on
//! small synthetic scenes.

use featbench_core::bench::{parse_csv, run_suite, to_csv, to_markdown, Algo, SuiteConfig};
use featbench_core::distort::{adjust_intensity, rotate};
use featbench_core::imgcore::synth;
use featbench_core::matcher::match_rate;
use featbench_core::sift::{sift_detect, SiftConfig};
use featbench_core::surf::{surf_describe, surf_extract, SurfConfig};
use featbench_core::{GrayImage, IntegralImage};

fn square_scene(side: usize, seed: u64) -> GrayImage {
    // Odd side: the quarter turn is an exact pixel permutation.
    synth::scene(side, side, seed)
}

#[test]
fn sift_counts_survive_a_quarter_turn() {
    for seed in [3, 17] {
        let img = square_scene(255, seed);
        let (a, _) = sift_detect(&img, &SiftConfig::default()).unwrap();
        let (b, _) = sift_detect(&rotate(&img, 90.0), &SiftConfig::default()).unwrap();
        let (a, b) = (a.len() as f64, b.len() as f64);
        assert!(a > 20.0, "seed {seed}: only {a} keypoints");
        assert!((a - b).abs() <= 0.15 * a.max(b), "seed {seed}: {a} vs {b}");
    }
}

#[test]
fn surf_descriptors_ignore_a_bias() {
    let base = square_scene(160, 5);
    let dim = GrayImage::from_fn(160, 160, |x, y| base.get(x, y) * 0.8).unwrap();
    let lifted = adjust_intensity(&dim, 1.0, 20.0).unwrap();
    let (kps, d1) = surf_extract(&dim, &SurfConfig::default()).unwrap();
    assert!(!kps.is_empty());
    let d2 = surf_describe(&IntegralImage::new(&lifted), &kps);
    assert_eq!(d1.len(), d2.len());
    for (a, b) in d1.iter().zip(&d2) {
        for (x, y) in a.as_real().unwrap().iter().zip(b.as_real().unwrap()) {
            assert!((x - y).abs() <= 1e-3);
        }
    }
}

#[test]
fn suite_rows_are_consistent_and_round_trip() {
    let img = synth::scene(192, 192, 9);
    let cfg = SuiteConfig {
        repetitions: 1,
        ..SuiteConfig::default()
    };
    let outcome = run_suite(&img, &cfg).unwrap();
    assert!(outcome.failures.is_empty(), "{:?}", outcome.failures);
    assert_eq!(outcome.results.len(), 7 * Algo::ALL.len());
    for r in &outcome.results {
        assert!(r.matches <= r.kpnts1.min(r.kpnts2), "{r:?}");
        let expect = match_rate(r.matches, r.kpnts1, r.kpnts2).unwrap();
        assert!((expect - r.match_rate_pct).abs() <= 0.05, "{r:?}");
        assert!(r.time_ms >= 0.0);
    }
    let csv = to_csv(&outcome.results, &cfg).unwrap();
    assert!(csv.starts_with("# featbench seed=42"));
    assert_eq!(parse_csv(&csv).unwrap(), outcome.results);
    let md = to_markdown(&outcome.results, &cfg).unwrap();
    assert!(md.contains("### identity"));
}
