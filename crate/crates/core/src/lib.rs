//! Feature detection, description and matching (SIFT, SURF, ORB) together
//! with a harness that measures how well each pipeline survives intensity
//! changes, rotation, scaling, shearing, fisheye distortion and
//! salt-and-pepper noise.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod distort;
pub mod imgcore;
pub mod matcher;
pub mod orb;
pub mod rng;
pub mod sift;
pub mod surf;

pub use distort::Scenario;
pub use imgcore::{Descriptor, GrayImage, IntegralImage, Keypoint};
pub use matcher::{MatchConfig, MatchPair};
