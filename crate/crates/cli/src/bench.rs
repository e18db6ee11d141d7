//! Wall-clock timing of the exact solver over input sizes and backends.

use std::io::Write;
use std::time::Instant;

use lms2d::{solve_lms_with, Backend, LmsFit, Point2, SolveOptions};
use lms2d_vision::synth::{stream_rng, unit_draw};
use serde::Serialize;

/// RNG stream for benchmark point sets.
pub const BENCH_STREAM: u64 = 3;

/// `n` points on `y = 0.5x + 10` in `[0, 1000)`, a third of them replaced
/// by uniform outliers. Reproducible from `seed`.
pub fn bench_points(n: usize, seed: u64) -> Vec<Point2> {
    let mut rng = stream_rng(seed, BENCH_STREAM);
    (0..n)
        .map(|k| {
            let x = 1000.0 * unit_draw(&mut rng);
            let y = if k % 3 == 2 {
                1000.0 * unit_draw(&mut rng)
            } else {
                0.5 * x + 10.0 + (unit_draw(&mut rng) - 0.5)
            };
            Point2::new(x, y)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub n: usize,
    pub backend: String,
    pub workers: usize,
    pub repeats: usize,
    pub slope: f64,
    pub intercept: f64,
    pub lms_value: f64,
    pub median_ms: f64,
    pub min_ms: f64,
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / 2.0
    }
}

/// Times `repeats` solves and returns the last fit alongside the timing.
pub fn time_solve(points: &[Point2], opts: &SolveOptions, repeats: usize) -> lms2d::Result<(LmsFit, Vec<f64>)> {
    let mut times = Vec::with_capacity(repeats);
    let mut fit = None;
    for _ in 0..repeats.max(1) {
        let started = Instant::now();
        fit = Some(solve_lms_with(points, opts)?);
        times.push(started.elapsed().as_secs_f64() * 1e3);
    }
    Ok((fit.expect("at least one repeat"), times))
}

/// Sizes must be powers of two in `[64, 1024]`.
pub fn validate_sizes(sizes: &[usize]) -> anyhow::Result<()> {
    if sizes.is_empty() {
        anyhow::bail!("no bench sizes given");
    }
    if let Some(n) = sizes.iter().find(|n| !n.is_power_of_two() || !(64..=1024).contains(*n)) {
        anyhow::bail!("bench size {n} is not a power of two in [64, 1024]");
    }
    Ok(())
}

pub fn run_bench(sizes: &[usize], backends: &[Backend], repeats: usize, seed: u64, base: SolveOptions) -> lms2d::Result<Vec<BenchRow>> {
    let mut rows = Vec::new();
    for &n in sizes {
        let points = bench_points(n, seed);
        for &backend in backends {
            let opts = SolveOptions { backend, ..base };
            let (fit, times) = time_solve(&points, &opts, repeats)?;
            rows.push(BenchRow {
                n,
                backend: backend.name().to_string(),
                workers: backend.worker_count(),
                repeats: times.len(),
                slope: fit.line.slope,
                intercept: fit.line.intercept,
                lms_value: fit.lms_value,
                min_ms: times.iter().copied().fold(f64::INFINITY, f64::min),
                median_ms: median(times),
            });
        }
    }
    Ok(rows)
}

pub fn write_bench<W: Write>(writer: W, rows: &[BenchRow]) -> anyhow::Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    for r in rows {
        wtr.serialize(r)?;
    }
    wtr.flush()?;
    Ok(())
}
