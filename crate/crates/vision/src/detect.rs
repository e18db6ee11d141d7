//! Feature extraction and the full detection pipeline:
//! extract, vote, pick peaks, gather support, refine.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use lms2d::{default_coverage, LmsFit, Point2, SolveOptions};
use serde::{Deserialize, Serialize};

use crate::error::{Result, VisionError};
use crate::hough::{find_peaks, hough_vote, supporting_points, HoughParams, Peak};
use crate::image::GrayImage;
use crate::refine::{refine_lms, refine_ols, sht_line, FittedLine, RegressionFrame};

pub const DEFAULT_THRESHOLD: u8 = 128;

/// Pixel centers with intensity at least `threshold`, row-major.
/// Coordinates are `(column, row)`: y grows downward.
pub fn extract_points(image: &GrayImage, threshold: u8) -> Vec<Point2> {
    let mut out = Vec::new();
    for y in 0..image.height() {
        for x in 0..image.width() {
            if image.get(x, y) >= threshold {
                out.push(Point2::new(x as f64, y as f64));
            }
        }
    }
    out
}

/// Pixels whose 3x3 Sobel gradient magnitude is at least `threshold`.
/// Border pixels are never reported.
pub fn sobel_points(image: &GrayImage, threshold: f64) -> Vec<Point2> {
    let (w, h) = (image.width(), image.height());
    let mut out = Vec::new();
    if w < 3 || h < 3 {
        return out;
    }
    let px = |x: usize, y: usize| f64::from(image.get(x, y));
    for y in 1..h - 1 {
        for x in 1..w - 1 {
            let gx = px(x + 1, y - 1) + 2.0 * px(x + 1, y) + px(x + 1, y + 1)
                - px(x - 1, y - 1)
                - 2.0 * px(x - 1, y)
                - px(x - 1, y + 1);
            let gy = px(x - 1, y + 1) + 2.0 * px(x, y + 1) + px(x + 1, y + 1)
                - px(x - 1, y - 1)
                - 2.0 * px(x, y - 1)
                - px(x + 1, y - 1);
            if gx.hypot(gy) >= threshold {
                out.push(Point2::new(x as f64, y as f64));
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FeatureExtractor {
    Intensity(u8),
    Sobel(f64),
}

impl Default for FeatureExtractor {
    fn default() -> Self {
        FeatureExtractor::Intensity(DEFAULT_THRESHOLD)
    }
}

impl FeatureExtractor {
    pub fn extract(&self, image: &GrayImage) -> Vec<Point2> {
        match *self {
            FeatureExtractor::Intensity(t) => extract_points(image, t),
            FeatureExtractor::Sobel(t) => sobel_points(image, t),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "SHT")]
    Sht,
    #[serde(rename = "OLS")]
    Ols,
    #[serde(rename = "LMS")]
    Lms,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Sht, Method::Ols, Method::Lms];
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Sht => "SHT",
            Method::Ols => "OLS",
            Method::Lms => "LMS",
        })
    }
}

impl FromStr for Method {
    type Err = VisionError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sht" => Ok(Method::Sht),
            "ols" => Ok(Method::Ols),
            "lms" => Ok(Method::Lms),
            other => Err(VisionError::InvalidParams(format!("unknown method {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectConfig {
    pub delta_rho: f64,
    pub delta_theta_deg: f64,
    pub extractor: FeatureExtractor,
    pub min_votes: u32,
    /// LMS coverage; `None` uses `floor(|support|/2) + 1` per peak.
    pub coverage: Option<usize>,
    pub solve: SolveOptions,
}

impl DetectConfig {
    pub fn new(delta_rho: f64, delta_theta_deg: f64) -> Self {
        Self {
            delta_rho,
            delta_theta_deg,
            extractor: FeatureExtractor::default(),
            min_votes: 3,
            coverage: None,
            solve: SolveOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineDetection {
    pub method: Method,
    pub peak: Peak,
    pub line: FittedLine,
    pub support: Vec<Point2>,
    pub lms: Option<LmsFit>,
}

/// Refines one peak with `method`.
pub fn refine_peak(points: &[Point2], peak: &Peak, params: &HoughParams, method: Method, config: &DetectConfig) -> Result<LineDetection> {
    let support = supporting_points(points, peak, params);
    let frame = RegressionFrame::for_peak(peak);
    let (line, lms) = match method {
        Method::Sht => (sht_line(peak), None),
        Method::Ols => (refine_ols(&support, frame)?, None),
        Method::Lms => {
            let q = config.coverage.unwrap_or_else(|| default_coverage(support.len()));
            let opts = SolveOptions { coverage: Some(q), ..config.solve };
            let (line, fit) = refine_lms(&support, frame, &opts)?;
            (line, Some(fit))
        }
    };
    Ok(LineDetection { method, peak: *peak, line, support, lms })
}

/// Peaks of the image's accumulator together with the points and params
/// that produced them, so several methods can share one vote.
pub struct Voted {
    pub points: Vec<Point2>,
    pub params: HoughParams,
    pub peaks: Vec<Peak>,
}

pub fn vote_image(image: &GrayImage, config: &DetectConfig, max_peaks: usize) -> Result<Voted> {
    if image.is_empty() {
        return Err(VisionError::InvalidParams("empty image".into()));
    }
    let params = HoughParams::new(config.delta_rho, config.delta_theta_deg, image.width(), image.height())?;
    let points = config.extractor.extract(image);
    let acc = hough_vote(&points, &params);
    let peaks = find_peaks(&acc, max_peaks, config.min_votes);
    Ok(Voted { points, params, peaks })
}

pub fn detect_lines(image: &GrayImage, config: &DetectConfig, method: Method, max_peaks: usize) -> Result<Vec<LineDetection>> {
    let voted = vote_image(image, config, max_peaks)?;
    voted
        .peaks
        .iter()
        .map(|peak| refine_peak(&voted.points, peak, &voted.params, method, config))
        .collect()
}

#[derive(Debug, Serialize)]
struct DetectionRow {
    method: Method,
    rho: f64,
    theta: f64,
    slope: f64,
    intercept: f64,
    lms_value: Option<f64>,
    support_count: usize,
}

/// `method,rho,theta,slope,intercept,lms_value,support_count`; slope and
/// intercept are image-frame `y = slope*x + intercept` (`inf`/`NaN` for
/// vertical lines), `lms_value` is empty for non-LMS methods.
pub fn write_detections<W: Write>(writer: W, detections: &[LineDetection]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    for d in detections {
        let (rho, theta) = d.line.polar();
        let (slope, intercept) = d.line.slope_intercept();
        wtr.serialize(DetectionRow {
            method: d.method,
            rho,
            theta,
            slope,
            intercept,
            lms_value: d.lms.as_ref().map(|f| f.lms_value),
            support_count: d.support.len(),
        })?;
    }
    wtr.flush()?;
    Ok(())
}
