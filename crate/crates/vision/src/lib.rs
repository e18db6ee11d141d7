//! Line detection in images: Hough voting locates candidate lines on a
//! coarse grid, then each peak's supporting points are refitted by ordinary
//! least squares or by exact least median of squares.
//!
//! Also provides the synthetic single-line images used to measure accuracy
//! against ground truth, and binary PGM I/O.

pub mod detect;
pub mod error;
pub mod hough;
pub mod image;
pub mod pgm;
pub mod refine;
pub mod synth;

pub use detect::{detect_lines, extract_points, DetectConfig, FeatureExtractor, LineDetection, Method};
pub use error::{Result, VisionError};
pub use hough::{find_peaks, hough_vote, supporting_points, HoughAccumulator, HoughParams, Peak};
pub use image::GrayImage;
pub use pgm::{read_pgm, write_pgm};
pub use refine::{refine_lms, refine_ols, FittedLine, RegressionFrame};
pub use synth::{gen_synthetic, GroundTruth, SyntheticLine, SyntheticSpec};
