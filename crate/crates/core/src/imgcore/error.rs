use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ImageError {
    #[error("cannot open {path}: {source}")]
    Open { path: PathBuf, source: std::io::Error },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed PGM header: {0}")]
    MalformedHeader(String),
    #[error("unsupported maxval {0} (only 255 is supported)")]
    UnsupportedMaxval(u32),
    #[error("truncated pixel data: expected {expected} samples, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("invalid dimensions {width}x{height}")]
    InvalidDimensions { width: usize, height: usize },
    #[error("pixel buffer has {actual} samples, expected {expected}")]
    BufferLength { expected: usize, actual: usize },
    #[error("intensity {value} at index {index} outside [0, 255]")]
    IntensityOutOfRange { index: usize, value: f32 },
    #[error("gaussian sigma must be positive, got {0}")]
    InvalidSigma(f64),
    #[error("rectangle ({x0},{y0})-({x1},{y1}) outside {width}x{height} image")]
    RectOutOfRange {
        x0: usize,
        y0: usize,
        x1: usize,
        y1: usize,
        width: usize,
        height: usize,
    },
    #[error("image {width}x{height} too small (need at least {min_width}x{min_height})")]
    TooSmall {
        width: usize,
        height: usize,
        min_width: usize,
        min_height: usize,
    },
}
