//! The dual plane.
//!
//! A primal point `(a, b)` maps to the dual line `v = a*u - b`, and the
//! non-vertical primal line `y = a*x - b` maps to the dual point `(a, b)`.
//! Under this mapping a point lies above a line exactly when its dual line
//! passes below the line's dual point, two points' duals meet at the dual of
//! the line through them, and a strip of vertical height `h` becomes a
//! vertical segment (a *bracelet*) of length `h` that is crossed by the dual
//! lines of exactly the points inside the strip.

use crate::error::Result;
use crate::geometry::{validate_points, LineEq, Point2};
use crate::sort::{bitonic_sort, decode_key, order_key};

/// Dual line `v = a*u - b` of the primal point `(a, b)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualLine {
    pub a: f64,
    pub b: f64,
    pub source_index: usize,
}

impl DualLine {
    #[inline]
    pub fn eval(&self, u: f64) -> f64 {
        // `+ 0.0` folds -0.0 into 0.0 so equal values compare equal by key.
        self.a * u - self.b + 0.0
    }
}

/// Dual point of a primal non-vertical line.
pub fn dual_point(line: &LineEq) -> (f64, f64) {
    (line.slope, -line.intercept)
}

/// Primal line whose dual point is `(u, v)`.
pub fn primal_line(u: f64, v: f64) -> LineEq {
    LineEq::new(u, -v + 0.0)
}

pub fn dualize(points: &[Point2]) -> Result<Vec<DualLine>> {
    validate_points(points)?;
    Ok(points
        .iter()
        .enumerate()
        .map(|(source_index, p)| DualLine { a: p.x, b: p.y, source_index })
        .collect())
}

/// Crossing of two dual lines; `i < j` are the generating source indices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualIntersection {
    pub u: f64,
    pub v: f64,
    pub i: usize,
    pub j: usize,
}

/// Intersection of two dual lines, or `None` when they are parallel
/// (equal `a`, including coincident duals of duplicate points).
pub fn pair_intersection(l1: &DualLine, l2: &DualLine) -> Option<DualIntersection> {
    debug_assert_ne!(l1.source_index, l2.source_index);
    let (first, second) = if l1.source_index < l2.source_index { (l1, l2) } else { (l2, l1) };
    if first.a == second.a {
        return None;
    }
    let u = (first.b - second.b) / (first.a - second.a) + 0.0;
    Some(DualIntersection {
        u,
        v: first.eval(u),
        i: first.source_index,
        j: second.source_index,
    })
}

/// One dual line's value on a vertical cut.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutValue {
    pub v: f64,
    pub index: usize,
}

/// Values of all dual lines at abscissa `u`, ascending by value with ties
/// broken by line index.
pub fn vertical_cut(lines: &[DualLine], u: f64) -> Vec<CutValue> {
    let mut cut: Vec<CutValue> = lines
        .iter()
        .enumerate()
        .map(|(index, l)| CutValue { v: l.eval(u), index })
        .collect();
    cut.sort_by(|x, y| x.v.total_cmp(&y.v).then(x.index.cmp(&y.index)));
    cut
}

/// A vertical dual segment anchored at an intersection and crossed by
/// exactly `coverage` dual lines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracelet {
    pub u: f64,
    pub v_low: f64,
    pub v_high: f64,
    pub anchor: DualIntersection,
    pub coverage: usize,
}

impl Bracelet {
    pub fn height(&self) -> f64 {
        self.v_high - self.v_low
    }

    /// Primal line bisecting the slab this bracelet represents.
    pub fn bisector(&self) -> LineEq {
        primal_line(self.u, (self.v_low + self.v_high) / 2.0)
    }
}

/// How a cut is ordered before windows are read off it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CutSort {
    /// Standard library pattern-defeating quicksort.
    #[default]
    Comparison,
    /// Bitonic sorting network; the cut is padded to a power of two with
    /// sentinels that sort after every real value.
    Bitonic,
}

/// Which anchored window produced a bracelet.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Direction {
    /// Window whose top is the anchor.
    Down,
    /// Window whose bottom is the anchor.
    Up,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Window {
    pub v_low: f64,
    pub v_high: f64,
    pub direction: Direction,
}

impl Window {
    pub fn height(&self) -> f64 {
        self.v_high - self.v_low
    }
}

/// Reusable per-worker buffers for bracelet evaluation.
#[derive(Debug, Default)]
pub(crate) struct CutWorkspace {
    keys: Vec<u64>,
    sort: CutSort,
}

impl CutWorkspace {
    pub fn new(sort: CutSort) -> Self {
        Self { keys: Vec::new(), sort }
    }

    /// Shorter of the two windows of `q` consecutive cut values anchored at
    /// the intersection; the downward window wins ties.
    pub fn best_window(&mut self, lines: &[DualLine], ip: &DualIntersection, q: usize) -> Option<Window> {
        let n = lines.len();
        if q < 2 || q > n {
            return None;
        }
        let u = ip.u;
        self.keys.clear();
        self.keys.extend(lines.iter().map(|l| order_key(l.eval(u))));

        // Ranks of the two anchor lines under the (value, index) order.
        let key_i = self.keys[ip.i];
        let key_j = self.keys[ip.j];
        let (mut rank_i, mut rank_j) = (0usize, 0usize);
        for (k, &key) in self.keys.iter().enumerate() {
            rank_i += usize::from(key < key_i || (key == key_i && k < ip.i));
            rank_j += usize::from(key < key_j || (key == key_j && k < ip.j));
        }
        let (lo, hi) = (rank_i.min(rank_j), rank_i.max(rank_j));

        match self.sort {
            CutSort::Comparison => self.keys.sort_unstable(),
            CutSort::Bitonic => {
                self.keys.resize(n.next_power_of_two(), u64::MAX);
                bitonic_sort(&mut self.keys);
            }
        }
        let value = |rank: usize| decode_key(self.keys[rank]);

        let down = (hi + 1 >= q).then(|| Window {
            v_low: value(hi + 1 - q),
            v_high: value(hi),
            direction: Direction::Down,
        });
        let up = (lo + q <= n).then(|| Window {
            v_low: value(lo),
            v_high: value(lo + q - 1),
            direction: Direction::Up,
        });
        match (down, up) {
            (Some(d), Some(w)) => Some(if w.height() < d.height() { w } else { d }),
            (d, w) => d.or(w),
        }
    }
}

/// The shortest bracelet of coverage `q` with an end at `ip`.
///
/// Both anchored windows are considered: the one whose upper end is the
/// anchor and the one whose lower end is. A window that would run past
/// either end of the cut is not a candidate; no wraparound is applied.
pub fn bracelet_at(ip: &DualIntersection, lines: &[DualLine], q: usize) -> Option<Bracelet> {
    CutWorkspace::new(CutSort::Comparison)
        .best_window(lines, ip, q)
        .map(|w| Bracelet {
            u: ip.u,
            v_low: w.v_low,
            v_high: w.v_high,
            anchor: *ip,
            coverage: q,
        })
}
