//! Brute-force LMS used to cross-check the dual solver.
//!
//! Works entirely in the primal plane: for every slope through two points,
//! sort the implied intercepts and scan all windows of `q` consecutive
//! values. It shares no code with the dual pipeline beyond input checks.

use crate::error::Result;
use crate::geometry::{LineEq, Point2};
use crate::solver::{prepare, LmsFit};

/// Exhaustive O(n³ log n) LMS. Ties go to the lexicographically smallest
/// generating pair, then to the lowest window.
pub fn oracle_lms(points: &[Point2], coverage: Option<usize>) -> Result<LmsFit> {
    let q = prepare(points, coverage)?;
    let n = points.len();
    let mut intercepts = vec![0.0f64; n];
    // (span, slope, low, high, i, j)
    let mut best: Option<(f64, f64, f64, f64, usize, usize)> = None;

    for i in 0..n {
        for j in i + 1..n {
            let (pi, pj) = (points[i], points[j]);
            if pi.x == pj.x {
                continue;
            }
            let slope = (pj.y - pi.y) / (pj.x - pi.x) + 0.0;
            for (c, p) in intercepts.iter_mut().zip(points) {
                *c = p.y - slope * p.x;
            }
            intercepts.sort_by(f64::total_cmp);
            for w in intercepts.windows(q) {
                let span = w[q - 1] - w[0];
                if best.is_none_or(|b| span < b.0) {
                    best = Some((span, slope, w[0], w[q - 1], i, j));
                }
            }
        }
    }

    let (span, slope, low, high, i, j) = best.expect("prepare guarantees two distinct abscissae");
    let line = LineEq::new(slope, (high + low) / 2.0 + 0.0);
    Ok(LmsFit::from_slab(points, line, span, q, (i, j)))
}
