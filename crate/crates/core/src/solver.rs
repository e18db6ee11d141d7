//! Exact LMS line fitting.
//!
//! The LMS line bisects the thinnest slab (in vertical extent) containing
//! `q` points. In the dual plane that slab is the shortest vertical segment
//! crossed by `q` dual lines, and because the optimal line equioscillates
//! about three of the points, one end of that segment sits on a crossing of
//! two dual lines. Enumerating the bracelets anchored at every crossing is
//! therefore exhaustive.

use crate::backend::{run_phase1, run_phase2, run_streaming, Backend, CandidateRecord};
use crate::dual::{dualize, primal_line, CutSort};
use crate::error::{Degeneracy, LmsError, Result};
use crate::geometry::{validate_points, LineEq, Point2};

/// Absolute tolerance for contact classification, scaled by the magnitude
/// of the values being compared.
pub const EPS_GEOM: f64 = 1e-9;

/// Default coverage: the median order statistic `floor(n/2) + 1`.
pub fn default_coverage(n: usize) -> usize {
    n / 2 + 1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SolveOptions {
    /// Points the slab must contain; `None` means [`default_coverage`].
    pub coverage: Option<usize>,
    pub backend: Backend,
    pub sort: CutSort,
    /// Store all intersections before evaluating them instead of streaming.
    pub materialize: bool,
}

impl SolveOptions {
    pub fn with_coverage(mut self, q: usize) -> Self {
        self.coverage = Some(q);
        self
    }

    pub fn with_backend(mut self, backend: Backend) -> Self {
        self.backend = backend;
        self
    }
}

/// Result of an LMS fit.
#[derive(Debug, Clone, PartialEq)]
pub struct LmsFit {
    pub line: LineEq,
    /// The minimized `q`-th smallest squared residual.
    pub lms_value: f64,
    /// Vertical extent of the optimal slab, `2 * sqrt(lms_value)`.
    pub slab_height: f64,
    pub coverage: usize,
    /// Points on either slab boundary.
    pub contact_indices: Vec<usize>,
    /// Pair of points whose joining line fixed the slope.
    pub anchor: (usize, usize),
}

impl LmsFit {
    pub(crate) fn from_slab(points: &[Point2], line: LineEq, height: f64, coverage: usize, anchor: (usize, usize)) -> Self {
        let half = height / 2.0;
        let tol = contact_tolerance(points, &line);
        let contact_indices = points
            .iter()
            .enumerate()
            .filter(|(_, p)| (line.residual(**p).abs() - half).abs() <= tol)
            .map(|(k, _)| k)
            .collect();
        Self {
            line,
            lms_value: half * half,
            slab_height: height,
            coverage,
            contact_indices,
            anchor,
        }
    }

    /// Contacts on the upper and lower slab boundary respectively. When the
    /// slab is flat a contact counts for both.
    pub fn boundary_contacts(&self, points: &[Point2]) -> (Vec<usize>, Vec<usize>) {
        let half = self.slab_height / 2.0;
        let tol = contact_tolerance(points, &self.line);
        let side = |sign: f64| {
            self.contact_indices
                .iter()
                .copied()
                .filter(|&k| (self.line.residual(points[k]) - sign * half).abs() <= tol)
                .collect::<Vec<_>>()
        };
        (side(1.0), side(-1.0))
    }

    /// At least three contacts with both boundaries touched.
    pub fn is_equioscillating(&self, points: &[Point2]) -> bool {
        let (upper, lower) = self.boundary_contacts(points);
        self.contact_indices.len() >= 3 && !upper.is_empty() && !lower.is_empty()
    }
}

pub(crate) fn contact_tolerance(points: &[Point2], line: &LineEq) -> f64 {
    let scale = points
        .iter()
        .map(|p| (line.slope * p.x).abs() + p.y.abs() + line.intercept.abs())
        .fold(1.0, f64::max);
    EPS_GEOM * scale
}

/// Checks the shared preconditions and resolves the coverage.
pub(crate) fn prepare(points: &[Point2], coverage: Option<usize>) -> Result<usize> {
    validate_points(points)?;
    let n = points.len();
    if n < 3 {
        return Err(LmsError::Degenerate(Degeneracy::TooFewPoints(n)));
    }
    if points.iter().all(|p| p.x == points[0].x) {
        return Err(LmsError::Degenerate(Degeneracy::SingleAbscissa));
    }
    let q = coverage.unwrap_or_else(|| default_coverage(n));
    if q < 2 || q > n {
        return Err(LmsError::InvalidCoverage { q, n });
    }
    Ok(q)
}

/// Exact LMS fit with the default sequential backend.
pub fn solve_lms(points: &[Point2], coverage: Option<usize>) -> Result<LmsFit> {
    solve_lms_with(points, &SolveOptions { coverage, ..SolveOptions::default() })
}

pub fn solve_lms_with(points: &[Point2], opts: &SolveOptions) -> Result<LmsFit> {
    let q = prepare(points, opts.coverage)?;
    let best = best_candidate(points, q, opts)?;
    let line = primal_line(best.u, (best.v_low + best.v_high) / 2.0);
    Ok(LmsFit::from_slab(points, line, best.height, q, best.anchor))
}

/// The minimum bracelet itself, for callers that want the dual view.
pub fn best_candidate(points: &[Point2], q: usize, opts: &SolveOptions) -> Result<CandidateRecord> {
    let lines = dualize(points)?;
    if opts.materialize {
        let ips = run_phase1(&lines, opts.backend);
        run_phase2(&ips, &lines, q, opts.backend, opts.sort)
    } else {
        run_streaming(&lines, q, opts.backend, opts.sort)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(v: &[(f64, f64)]) -> Vec<Point2> {
        v.iter().map(|&p| p.into()).collect()
    }

    #[test]
    fn exact_line_through_q_points() {
        let p = pts(&[(0.0, 1.0), (1.0, 3.0), (2.0, 5.0), (3.0, 7.0)]);
        let fit = solve_lms(&p, Some(3)).unwrap();
        assert_eq!(fit.line, LineEq::new(2.0, 1.0));
        assert_eq!(fit.lms_value, 0.0);
        assert_eq!(fit.contact_indices, vec![0, 1, 2, 3]);
    }

    #[test]
    fn inliers_survive_far_outliers() {
        let mut p: Vec<Point2> = (0..5).map(|i| Point2::new(i as f64, i as f64)).collect();
        p.extend(pts(&[(0.5, 900.0), (2.5, -4000.0), (7.0, 1e5), (-3.0, 77.0)]));
        let fit = solve_lms(&p, None).unwrap();
        assert_eq!(fit.coverage, 5);
        assert_eq!(fit.line, LineEq::new(1.0, 0.0));
        assert_eq!(fit.lms_value, 0.0);
    }

    #[test]
    fn unit_square() {
        let p = pts(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)]);
        let fit = solve_lms(&p, Some(3)).unwrap();
        assert_eq!(fit.line, LineEq::new(0.0, 0.5));
        assert_eq!(fit.lms_value, 0.25);
        assert_eq!(fit.slab_height, 1.0);
        assert_eq!(fit.anchor, (0, 1));
        assert!(fit.is_equioscillating(&p));
    }

    #[test]
    fn degenerate_inputs() {
        let two = pts(&[(0.0, 0.0), (1.0, 1.0)]);
        assert!(matches!(solve_lms(&two, None), Err(LmsError::Degenerate(Degeneracy::TooFewPoints(2)))));
        let vertical = pts(&[(3.0, 0.0), (3.0, 1.0), (3.0, 9.0)]);
        assert!(matches!(solve_lms(&vertical, None), Err(LmsError::Degenerate(Degeneracy::SingleAbscissa))));
        let p = pts(&[(0.0, 0.0), (1.0, 1.0), (2.0, 0.0)]);
        assert!(matches!(solve_lms(&p, Some(4)), Err(LmsError::InvalidCoverage { q: 4, n: 3 })));
        assert!(matches!(solve_lms(&p, Some(1)), Err(LmsError::InvalidCoverage { .. })));
        let bad = pts(&[(0.0, 0.0), (1.0, f64::NAN), (2.0, 0.0)]);
        assert!(matches!(solve_lms(&bad, None), Err(LmsError::NonFinite { index: 1 })));
    }

    #[test]
    fn duplicates_still_count_toward_coverage() {
        // Two copies of (1, 1) plus the line y = x through three more points.
        let p = pts(&[(1.0, 1.0), (1.0, 1.0), (0.0, 5.0), (2.0, -3.0), (3.0, 10.0)]);
        let fit = solve_lms(&p, Some(3)).unwrap();
        assert!(fit.lms_value.is_finite());
        let fit2 = solve_lms(&p, Some(2)).unwrap();
        assert_eq!(fit2.lms_value, 0.0);
    }

    #[test]
    fn option_variants_agree() {
        let p = pts(&[(0.1, 2.0), (1.3, -0.4), (2.2, 3.1), (3.9, 0.7), (4.4, 4.4), (5.0, -2.0), (6.1, 1.5)]);
        let base = solve_lms(&p, None).unwrap();
        for materialize in [false, true] {
            for sort in [CutSort::Comparison, CutSort::Bitonic] {
                for backend in [Backend::Sequential, Backend::Parallel { workers: Some(3) }] {
                    let opts = SolveOptions { coverage: None, backend, sort, materialize };
                    assert_eq!(solve_lms_with(&p, &opts).unwrap(), base);
                }
            }
        }
    }
}
