//! Exact two-dimensional least-median-of-squares (LMS) line regression.
//!
//! Points are mapped to dual lines; the LMS slab becomes the shortest
//! vertical segment crossed by `q` of them, and one end of that segment is
//! always a crossing of two dual lines. [`solve_lms`] evaluates the segment
//! anchored at every crossing, sequentially or on a rayon pool, and reduces
//! to the minimum with a deterministic tie-break. [`oracle_lms`] is an
//! independent brute-force check working purely in the primal plane.
//!
//! ```
//! use lms2d::{solve_lms, Point2};
//!
//! let pts = [(0.0, 1.0), (1.0, 3.0), (2.0, 5.0), (3.0, 7.0), (1.5, 40.0)];
//! let pts: Vec<Point2> = pts.iter().map(|&p| p.into()).collect();
//! let fit = solve_lms(&pts, None).unwrap();
//! assert_eq!((fit.line.slope, fit.line.intercept, fit.lms_value), (2.0, 1.0, 0.0));
//! ```

pub mod backend;
pub mod dual;
pub mod error;
pub mod geometry;
pub mod io;
pub mod oracle;
pub mod solver;
mod sort;

pub use backend::{Backend, BatchPlan, CandidateRecord};
pub use dual::{bracelet_at, dualize, pair_intersection, vertical_cut, Bracelet, CutSort, DualIntersection, DualLine};
pub use error::{Degeneracy, LmsError, Result};
pub use geometry::{median_sq_residual, LineEq, Point2};
pub use oracle::oracle_lms;
pub use solver::{default_coverage, solve_lms, solve_lms_with, LmsFit, SolveOptions, EPS_GEOM};
