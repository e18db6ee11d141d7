//! Primal-plane primitives: data points, non-vertical lines and residuals.

use serde::{Deserialize, Serialize};

use crate::error::{LmsError, Result};

/// A data point in the primal plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Same point with the axes exchanged.
    pub fn swapped(&self) -> Self {
        Self { x: self.y, y: self.x }
    }
}

impl From<(f64, f64)> for Point2 {
    fn from((x, y): (f64, f64)) -> Self {
        Self { x, y }
    }
}

/// The non-vertical line `y = slope * x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineEq {
    pub slope: f64,
    pub intercept: f64,
}

impl LineEq {
    pub const fn new(slope: f64, intercept: f64) -> Self {
        Self { slope, intercept }
    }

    /// Line through two points with distinct x-coordinates.
    pub fn through(p: Point2, q: Point2) -> Option<Self> {
        if p.x == q.x {
            return None;
        }
        let slope = (q.y - p.y) / (q.x - p.x);
        Some(Self { slope, intercept: p.y - slope * p.x })
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.slope * x + self.intercept
    }

    /// Signed vertical residual `y - (slope * x + intercept)`.
    pub fn residual(&self, p: Point2) -> f64 {
        p.y - (self.slope * p.x + self.intercept)
    }
}

/// Rejects empty input and non-finite coordinates.
pub(crate) fn validate_points(points: &[Point2]) -> Result<()> {
    match points.iter().position(|p| !p.is_finite()) {
        Some(index) => Err(LmsError::NonFinite { index }),
        None => Ok(()),
    }
}

/// The `q`-th smallest squared residual of `points` with respect to `line`
/// (1-based: `q = 1` is the minimum).
///
/// # Panics
/// If `q` is zero or exceeds the number of points.
pub fn median_sq_residual(points: &[Point2], line: &LineEq, q: usize) -> f64 {
    assert!(
        q >= 1 && q <= points.len(),
        "order statistic q={q} out of range for {} points",
        points.len()
    );
    let mut sq: Vec<f64> = points
        .iter()
        .map(|&p| {
            let r = line.residual(p);
            r * r
        })
        .collect();
    let (_, nth, _) = sq.select_nth_unstable_by(q - 1, f64::total_cmp);
    *nth
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residual_sign_follows_vertical_offset() {
        let line = LineEq::new(2.0, 1.0);
        assert_eq!(line.residual(Point2::new(1.0, 4.0)), 1.0);
        assert_eq!(line.residual(Point2::new(1.0, 2.0)), -1.0);
    }

    #[test]
    fn median_of_points_on_line_is_zero() {
        let pts: Vec<Point2> = (0..7).map(|i| Point2::new(i as f64, 2.0 * i as f64 + 1.0)).collect();
        for q in 1..=pts.len() {
            assert_eq!(median_sq_residual(&pts, &LineEq::new(2.0, 1.0), q), 0.0);
        }
    }

    #[test]
    fn order_statistics_by_hand() {
        let pts = [Point2::new(0.0, 0.0), Point2::new(0.0, 2.0)];
        let line = LineEq::new(0.0, 0.0);
        assert_eq!(median_sq_residual(&pts, &line, 1), 0.0);
        assert_eq!(median_sq_residual(&pts, &line, 2), 4.0);
    }

    #[test]
    #[should_panic]
    fn zero_order_statistic_panics() {
        median_sq_residual(&[Point2::new(0.0, 0.0)], &LineEq::new(0.0, 0.0), 0);
    }

    #[test]
    fn line_through_vertical_pair_is_none() {
        assert!(LineEq::through(Point2::new(1.0, 0.0), Point2::new(1.0, 5.0)).is_none());
        let l = LineEq::through(Point2::new(0.0, 1.0), Point2::new(4.0, 3.0)).unwrap();
        assert_eq!((l.slope, l.intercept), (0.5, 1.0));
    }

    #[test]
    fn non_finite_rejected() {
        let pts = [Point2::new(0.0, 0.0), Point2::new(f64::NAN, 1.0)];
        assert!(matches!(validate_points(&pts), Err(LmsError::NonFinite { index: 1 })));
    }
}
