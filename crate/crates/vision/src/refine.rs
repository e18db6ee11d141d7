//! Line estimates from a peak's supporting points.
//!
//! Regression uses the vertical-offset model, which cannot express vertical
//! lines. When the peak's normal angle lies within 45 degrees of the x-axis
//! (the line is closer to vertical than horizontal), x is regressed on y
//! instead. The same rule is applied to OLS and LMS.

use lms2d::{solve_lms_with, LineEq, LmsFit, Point2, SolveOptions};

use crate::error::{Result, VisionError};
use crate::hough::Peak;

/// Which coordinate is treated as the response.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegressionFrame {
    /// `y = slope * x + intercept`.
    YOnX,
    /// `x = slope * y + intercept`.
    XOnY,
}

impl RegressionFrame {
    pub fn for_theta(theta_deg: f64) -> Self {
        let from_axis = theta_deg.rem_euclid(180.0);
        if from_axis <= 45.0 || from_axis >= 135.0 {
            RegressionFrame::XOnY
        } else {
            RegressionFrame::YOnX
        }
    }

    pub fn for_peak(peak: &Peak) -> Self {
        Self::for_theta(peak.theta_center)
    }

    /// Maps an image point into this frame (and back; the map is an involution).
    pub fn map(&self, p: Point2) -> Point2 {
        match self {
            RegressionFrame::YOnX => p,
            RegressionFrame::XOnY => p.swapped(),
        }
    }
}

/// A line fitted in a regression frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FittedLine {
    pub frame: RegressionFrame,
    pub line: LineEq,
}

impl FittedLine {
    /// Image-frame `y = slope * x + intercept`. Vertical lines give an
    /// infinite slope and NaN intercept.
    pub fn slope_intercept(&self) -> (f64, f64) {
        match self.frame {
            RegressionFrame::YOnX => (self.line.slope, self.line.intercept),
            RegressionFrame::XOnY if self.line.slope == 0.0 => (f64::INFINITY, f64::NAN),
            RegressionFrame::XOnY => (1.0 / self.line.slope, -self.line.intercept / self.line.slope),
        }
    }

    /// Normal form `x cos(theta) + y sin(theta) = rho` with theta in `[0, 180)` degrees.
    pub fn polar(&self) -> (f64, f64) {
        let (a, b) = match self.frame {
            RegressionFrame::YOnX => (-self.line.slope, 1.0),
            RegressionFrame::XOnY => (1.0, -self.line.slope),
        };
        let norm = a.hypot(b);
        let (mut c, mut s, mut rho) = (a / norm, b / norm, self.line.intercept / norm);
        if s < 0.0 || (s == 0.0 && c < 0.0) {
            c = -c;
            s = -s;
            rho = -rho;
        }
        (rho, s.atan2(c).to_degrees() + 0.0)
    }

    /// `y` on the line at column `x`, if the line is not vertical.
    pub fn y_at(&self, x: f64) -> Option<f64> {
        let (s, t) = self.slope_intercept();
        s.is_finite().then_some(s * x + t)
    }

    /// `x` on the line at row `y`, if the line is not horizontal.
    pub fn x_at(&self, y: f64) -> Option<f64> {
        match self.frame {
            RegressionFrame::XOnY => Some(self.line.eval(y)),
            RegressionFrame::YOnX if self.line.slope == 0.0 => None,
            RegressionFrame::YOnX => Some((y - self.line.intercept) / self.line.slope),
        }
    }
}

/// The line at the center of the peak's bin.
pub fn sht_line(peak: &Peak) -> FittedLine {
    let frame = RegressionFrame::for_peak(peak);
    let th = peak.theta_center.to_radians();
    let (c, s, rho) = (th.cos(), th.sin(), peak.rho_center);
    let line = match frame {
        RegressionFrame::YOnX => LineEq::new(-c / s, rho / s),
        RegressionFrame::XOnY => LineEq::new(-s / c, rho / c),
    };
    FittedLine { frame, line }
}

/// Least-squares fit of the response on the regressor in `frame`.
pub fn refine_ols(support: &[Point2], frame: RegressionFrame) -> Result<FittedLine> {
    let pts: Vec<Point2> = support.iter().map(|&p| frame.map(p)).collect();
    if pts.len() < 2 {
        return Err(VisionError::DegenerateSupport(format!("{} points, need 2", pts.len())));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.x).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.y).sum::<f64>() / n;
    let (sxx, sxy) = pts.iter().fold((0.0, 0.0), |(sxx, sxy), p| {
        let dx = p.x - mx;
        (sxx + dx * dx, sxy + dx * (p.y - my))
    });
    if sxx == 0.0 {
        return Err(VisionError::DegenerateSupport("all regressor values equal".into()));
    }
    let slope = sxy / sxx;
    Ok(FittedLine { frame, line: LineEq::new(slope, my - slope * mx) })
}

/// Exact LMS fit in `frame`. The returned [`LmsFit`] is in frame coordinates.
pub fn refine_lms(support: &[Point2], frame: RegressionFrame, opts: &SolveOptions) -> Result<(FittedLine, LmsFit)> {
    let pts: Vec<Point2> = support.iter().map(|&p| frame.map(p)).collect();
    let fit = solve_lms_with(&pts, opts)?;
    Ok((FittedLine { frame, line: fit.line }, fit))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(v: &[(f64, f64)]) -> Vec<Point2> {
        v.iter().map(|&p| p.into()).collect()
    }

    #[test]
    fn frame_rule() {
        assert_eq!(RegressionFrame::for_theta(10.0), RegressionFrame::XOnY);
        assert_eq!(RegressionFrame::for_theta(170.0), RegressionFrame::XOnY);
        assert_eq!(RegressionFrame::for_theta(90.0), RegressionFrame::YOnX);
        assert_eq!(RegressionFrame::for_theta(60.0), RegressionFrame::YOnX);
    }

    #[test]
    fn ols_exact_and_symmetric() {
        let f = refine_ols(&pts(&[(0.0, 1.0), (1.0, 3.0), (2.0, 5.0)]), RegressionFrame::YOnX).unwrap();
        assert_eq!(f.line, LineEq::new(2.0, 1.0));
        let f = refine_ols(&pts(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)]), RegressionFrame::YOnX).unwrap();
        assert_eq!(f.line, LineEq::new(0.0, 0.5));
    }

    #[test]
    fn ols_degenerate() {
        assert!(refine_ols(&pts(&[(1.0, 1.0)]), RegressionFrame::YOnX).is_err());
        assert!(refine_ols(&pts(&[(1.0, 1.0), (1.0, 4.0)]), RegressionFrame::YOnX).is_err());
        // The same points are fine once axes are swapped.
        let f = refine_ols(&pts(&[(1.0, 1.0), (1.0, 4.0)]), RegressionFrame::XOnY).unwrap();
        assert_eq!(f.x_at(100.0), Some(1.0));
        assert_eq!(f.slope_intercept().0, f64::INFINITY);
    }

    #[test]
    fn lms_ignores_minority_noise() {
        let mut support: Vec<Point2> = (0..5).map(|i| Point2::new(i as f64 * 3.0, 2.0 * i as f64 + 7.0)).collect();
        support.extend(pts(&[(1.0, 40.0), (5.0, -3.0), (8.0, 90.0), (11.0, 0.0)]));
        let opts = SolveOptions::default().with_coverage(5);
        let (line, fit) = refine_lms(&support, RegressionFrame::YOnX, &opts).unwrap();
        assert_eq!(fit.lms_value, 0.0);
        let (s, t) = line.slope_intercept();
        assert!((s - 2.0 / 3.0).abs() < 1e-12 && (t - 7.0).abs() < 1e-12);
    }

    #[test]
    fn lms_vertical_support_needs_swap() {
        let support: Vec<Point2> = (0..9).map(|y| Point2::new(12.0, y as f64 * 5.0)).collect();
        assert!(refine_lms(&support, RegressionFrame::YOnX, &SolveOptions::default()).is_err());
        let (line, _) = refine_lms(&support, RegressionFrame::XOnY, &SolveOptions::default()).unwrap();
        assert_eq!(line.x_at(17.0), Some(12.0));
        let (rho, theta) = line.polar();
        assert!((rho - 12.0).abs() < 1e-12 && theta.abs() < 1e-12);
    }

    #[test]
    fn polar_of_both_frames_agree() {
        let a = FittedLine { frame: RegressionFrame::YOnX, line: LineEq::new(0.5, 3.0) };
        // Same line written as x = 2y - 6.
        let b = FittedLine { frame: RegressionFrame::XOnY, line: LineEq::new(2.0, -6.0) };
        let (ra, ta) = a.polar();
        let (rb, tb) = b.polar();
        assert!((ra - rb).abs() < 1e-12 && (ta - tb).abs() < 1e-12);
        let (s, t) = b.slope_intercept();
        assert!((s - 0.5).abs() < 1e-15 && (t - 3.0).abs() < 1e-15);
    }

    #[test]
    fn sht_line_is_bin_center() {
        let peak = Peak { rho_bin: 0, theta_bin: 0, votes: 1, rho_center: 10.0, theta_center: 90.0 };
        let l = sht_line(&peak);
        assert_eq!(l.frame, RegressionFrame::YOnX);
        assert!((l.y_at(123.0).unwrap() - 10.0).abs() < 1e-12);
        let (rho, theta) = l.polar();
        assert!((rho - 10.0).abs() < 1e-12 && (theta - 90.0).abs() < 1e-9);
        let peak = Peak { theta_center: 10.0, ..peak };
        let (rho, theta) = sht_line(&peak).polar();
        assert!((rho - 10.0).abs() < 1e-9 && (theta - 10.0).abs() < 1e-9);
    }
}
