//! Shared inputs for the criterion benchmarks.

use featbench_core::imgcore::synth;
use featbench_core::GrayImage;

/// Deterministic textured scene used by every benchmark.
pub fn fixture(side: usize) -> GrayImage {
    synth::scene(side, side, synth::DEFAULT_SCENE_SEED)
}
