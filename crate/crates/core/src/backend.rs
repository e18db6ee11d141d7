//! Execution backends for candidate evaluation.
//!
//! Phase 1 intersects every pair of dual lines; phase 2 hangs the shortest
//! anchored bracelet on each intersection and min-reduces the candidates.
//! Pairs `(i, j)` with `i < j` are enumerated row-major over the upper
//! triangle, so a linear pair index identifies each pair. Workers own
//! disjoint index ranges and only meet in the final reduction, whose
//! `(height, i, j)` order is total; any partitioning gives the same answer.

use std::borrow::Borrow;
use std::cmp::Ordering;
use std::ops::Range;

use rayon::prelude::*;

use crate::dual::{pair_intersection, CutSort, CutWorkspace, DualIntersection, DualLine, Window};
use crate::error::{LmsError, Result};

/// Environment variable overriding the parallel worker count.
pub const WORKERS_ENV: &str = "LMS2D_WORKERS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Backend {
    #[default]
    Sequential,
    /// Data-parallel evaluation on a rayon pool. `None` takes the worker
    /// count from `LMS2D_WORKERS`, falling back to rayon's default.
    Parallel { workers: Option<usize> },
}

impl Backend {
    /// Parses `"seq"` or `"par"`.
    pub fn from_name(name: &str, workers: Option<usize>) -> Option<Self> {
        match name {
            "seq" | "sequential" => Some(Backend::Sequential),
            "par" | "parallel" => Some(Backend::Parallel { workers }),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Backend::Sequential => "seq",
            Backend::Parallel { .. } => "par",
        }
    }

    /// Number of workers this backend will run with.
    pub fn worker_count(&self) -> usize {
        match self {
            Backend::Sequential => 1,
            Backend::Parallel { workers } => workers
                .or_else(|| std::env::var(WORKERS_ENV).ok().and_then(|s| s.trim().parse().ok()))
                .filter(|&w| w > 0)
                .unwrap_or_else(rayon::current_num_threads),
        }
    }
}

/// How the pair space is split across workers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BatchPlan {
    pub n: usize,
    /// Non-parallel pairs, i.e. intersections that exist.
    pub pair_count: usize,
    pub partition_size: usize,
    pub worker_count: usize,
}

impl BatchPlan {
    pub fn new(lines: &[DualLine], worker_count: usize) -> Self {
        let n = lines.len();
        let worker_count = worker_count.max(1);
        let pair_count = (0..n)
            .map(|i| lines[i + 1..].iter().filter(|l| l.a != lines[i].a).count())
            .sum();
        let total = total_pairs(n);
        // A few partitions per worker keeps the load balanced when rows of
        // the triangle finish at different speeds.
        let partition_size = if worker_count == 1 {
            total.max(1)
        } else {
            total.div_ceil(worker_count * 8).max(1)
        };
        Self { n, pair_count, partition_size, worker_count }
    }

    /// Linear pair index ranges, in order, covering every pair once.
    pub fn partitions(&self) -> impl Iterator<Item = Range<usize>> + '_ {
        let total = total_pairs(self.n);
        (0..total)
            .step_by(self.partition_size)
            .map(move |start| start..(start + self.partition_size).min(total))
    }
}

/// `n * (n - 1) / 2`.
pub fn total_pairs(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Linear index of the first pair in row `i`.
fn row_offset(n: usize, i: usize) -> usize {
    i * (2 * n - i - 1) / 2
}

/// Pair `(i, j)` at linear index `k` of the row-major upper triangle.
pub fn pair_at(n: usize, k: usize) -> (usize, usize) {
    debug_assert!(k < total_pairs(n));
    // Largest row whose offset is <= k.
    let (mut lo, mut hi) = (0, n - 1);
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if row_offset(n, mid) <= k {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let i = if row_offset(n, hi) <= k { hi } else { lo };
    (i, i + 1 + (k - row_offset(n, i)))
}

/// Pairs `(i, j)` whose linear indices lie in `range`.
fn pairs_in(n: usize, range: Range<usize>) -> impl Iterator<Item = (usize, usize)> {
    let start = if range.is_empty() { (0, 1) } else { pair_at(n, range.start) };
    range.scan(start, move |cur, _| {
        let out = *cur;
        cur.1 += 1;
        if cur.1 == n {
            cur.0 += 1;
            cur.1 = cur.0 + 1;
        }
        Some(out)
    })
}

fn intersections_in<'a>(
    lines: &'a [DualLine],
    range: Range<usize>,
) -> impl Iterator<Item = DualIntersection> + 'a {
    pairs_in(lines.len(), range).filter_map(move |(i, j)| pair_intersection(&lines[i], &lines[j]))
}

/// Streams every intersection of a non-parallel pair in pair order.
pub fn phase1_iter(lines: &[DualLine]) -> impl Iterator<Item = DualIntersection> + '_ {
    intersections_in(lines, 0..total_pairs(lines.len()))
}

/// Materializes all intersections, in pair order for either backend.
pub fn run_phase1(lines: &[DualLine], backend: Backend) -> Vec<DualIntersection> {
    match backend {
        Backend::Sequential => phase1_iter(lines).collect(),
        Backend::Parallel { .. } => {
            let plan = BatchPlan::new(lines, backend.worker_count());
            let ranges: Vec<_> = plan.partitions().collect();
            in_pool(backend, || {
                ranges
                    .into_par_iter()
                    .flat_map_iter(|r| intersections_in(lines, r).collect::<Vec<_>>())
                    .collect()
            })
        }
    }
}

/// The shortest bracelet hanging on one intersection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CandidateRecord {
    pub height: f64,
    pub anchor: (usize, usize),
    pub u: f64,
    pub v_low: f64,
    pub v_high: f64,
}

impl CandidateRecord {
    fn new(ip: &DualIntersection, w: Window) -> Self {
        Self {
            height: w.height(),
            anchor: (ip.i, ip.j),
            u: ip.u,
            v_low: w.v_low,
            v_high: w.v_high,
        }
    }

    /// Total order used by the reduction: height, then anchor indices.
    pub fn reduction_cmp(&self, other: &Self) -> Ordering {
        self.height
            .total_cmp(&other.height)
            .then(self.anchor.cmp(&other.anchor))
    }
}

fn pick(a: Option<CandidateRecord>, b: Option<CandidateRecord>) -> Option<CandidateRecord> {
    match (a, b) {
        (Some(x), Some(y)) => Some(if y.reduction_cmp(&x).is_lt() { y } else { x }),
        (x, y) => x.or(y),
    }
}

fn reduce_candidates<I>(lines: &[DualLine], q: usize, sort: CutSort, ips: I) -> Option<CandidateRecord>
where
    I: IntoIterator,
    I::Item: Borrow<DualIntersection>,
{
    let mut ws = CutWorkspace::new(sort);
    ips.into_iter().fold(None, |best, ip| {
        let ip = *ip.borrow();
        let cand = ws.best_window(lines, &ip, q).map(|w| CandidateRecord::new(&ip, w));
        pick(best, cand)
    })
}

fn in_pool<R: Send>(backend: Backend, job: impl FnOnce() -> R + Send) -> R {
    let workers = backend.worker_count();
    if workers == rayon::current_num_threads() {
        return job();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool.install(job),
        Err(_) => job(),
    }
}

/// Min-reduces the anchored bracelets of pre-computed intersections.
pub fn run_phase2(
    intersections: &[DualIntersection],
    lines: &[DualLine],
    q: usize,
    backend: Backend,
    sort: CutSort,
) -> Result<CandidateRecord> {
    let best = match backend {
        Backend::Sequential => reduce_candidates(lines, q, sort, intersections),
        Backend::Parallel { .. } => {
            let chunk = intersections.len().div_ceil(backend.worker_count() * 8).max(1);
            in_pool(backend, || {
                intersections
                    .par_chunks(chunk)
                    .map(|c| reduce_candidates(lines, q, sort, c))
                    .reduce(|| None, pick)
            })
        }
    };
    best.ok_or(LmsError::NoCandidate)
}

/// Fused phase 1 and 2: each worker intersects its own pair range and keeps
/// only its running minimum, so memory stays O(n) per worker.
pub fn run_streaming(lines: &[DualLine], q: usize, backend: Backend, sort: CutSort) -> Result<CandidateRecord> {
    let plan = BatchPlan::new(lines, backend.worker_count());
    let best = match backend {
        Backend::Sequential => reduce_candidates(lines, q, sort, phase1_iter(lines)),
        Backend::Parallel { .. } => {
            let ranges: Vec<_> = plan.partitions().collect();
            in_pool(backend, || {
                ranges
                    .into_par_iter()
                    .map(|r| reduce_candidates(lines, q, sort, intersections_in(lines, r)))
                    .reduce(|| None, pick)
            })
        }
    };
    best.ok_or(LmsError::NoCandidate)
}
