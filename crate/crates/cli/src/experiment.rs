//! Accuracy experiments on synthetic single-line images.
//!
//! Every cell of `seeds x noise levels x bin sizes x methods` produces one
//! [`MetricRow`]. For each seed a line is drawn across a 1024x1024 image,
//! sampled with probability 0.5 and buried in uniform noise; the strongest
//! Hough peak is then refined by each method and compared to the generator's
//! ground truth.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{bail, Context};
use lms2d::SolveOptions;
use lms2d_vision::detect::{refine_peak, vote_image};
use lms2d_vision::synth::{stream_rng, unit_draw};
use lms2d_vision::{gen_synthetic, DetectConfig, FittedLine, GroundTruth, Method, SyntheticLine, SyntheticSpec};
use serde::{Deserialize, Serialize};

/// RNG stream used to place the experiment line.
pub const GEOMETRY_STREAM: u64 = 2;
pub const IMAGE_SIZE: usize = 1024;
pub const SAMPLING_PROB: f64 = 0.5;

/// A line through a random point of the central half of the image, at an
/// angle of 20 to 70 degrees from the x-axis (either sign), extended to the
/// image border. Keeps the slope finite, nonzero and well conditioned for a
/// relative error.
pub fn experiment_line(seed: u64, width: usize, height: usize) -> SyntheticLine {
    let mut rng = stream_rng(seed, GEOMETRY_STREAM);
    let angle = (20.0 + 50.0 * unit_draw(&mut rng)).to_radians();
    let sign = if unit_draw(&mut rng) < 0.5 { -1.0 } else { 1.0 };
    let cx = width as f64 * (0.25 + 0.5 * unit_draw(&mut rng));
    let cy = height as f64 * (0.25 + 0.5 * unit_draw(&mut rng));
    let (dx, dy) = (angle.cos(), sign * angle.sin());
    let reach = (width as f64).hypot(height as f64);
    SyntheticLine::Endpoints {
        from: (cx - reach * dx, cy - reach * dy),
        to: (cx + reach * dx, cy + reach * dy),
    }
}

pub fn experiment_spec(seed: u64, noise_prob: f64) -> SyntheticSpec {
    SyntheticSpec {
        width: IMAGE_SIZE,
        height: IMAGE_SIZE,
        line: experiment_line(seed, IMAGE_SIZE, IMAGE_SIZE),
        sampling_prob: SAMPLING_PROB,
        noise_prob,
        seed,
    }
}

/// Accuracy of one estimate against ground truth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineErrors {
    /// `|s_est - s| / |s| * 100`, or `|s_est| * 100` when the true slope is 0.
    pub slope_error_pct: f64,
    pub intercept_error: f64,
    /// Mean vertical gap over the segment's columns for lines with
    /// `|slope| <= 1`, mean horizontal gap over its rows otherwise.
    pub pixel_separation_error: f64,
}

pub fn line_errors(estimate: &FittedLine, truth: &GroundTruth) -> LineErrors {
    let Some(gt) = truth.line() else {
        // Vertical truth: only the horizontal separation is meaningful.
        let x = truth.endpoints[0].0 as f64;
        let sep = mean_gap(truth.endpoints[0].1, truth.endpoints[1].1, |y| estimate.x_at(y).map(|v| (v - x).abs()));
        return LineErrors { slope_error_pct: f64::NAN, intercept_error: f64::NAN, pixel_separation_error: sep };
    };
    let (s, t) = estimate.slope_intercept();
    let slope_error_pct = if gt.slope == 0.0 {
        s.abs() * 100.0
    } else {
        ((s - gt.slope) / gt.slope).abs() * 100.0
    };
    let intercept_error = if s.is_finite() { (t - gt.intercept).abs() } else { f64::INFINITY };
    let [(x0, y0), (x1, y1)] = truth.endpoints;
    let pixel_separation_error = if gt.slope.abs() <= 1.0 {
        mean_gap(x0, x1, |x| estimate.y_at(x).map(|v| (v - gt.eval(x)).abs()))
    } else {
        mean_gap(y0, y1, |y| estimate.x_at(y).map(|v| (v - (y - gt.intercept) / gt.slope).abs()))
    };
    LineErrors { slope_error_pct, intercept_error, pixel_separation_error }
}

fn mean_gap(a: i64, b: i64, gap: impl Fn(f64) -> Option<f64>) -> f64 {
    let (lo, hi) = (a.min(b), a.max(b));
    let mut sum = 0.0;
    for k in lo..=hi {
        match gap(k as f64) {
            Some(g) => sum += g,
            None => return f64::INFINITY,
        }
    }
    sum / (hi - lo + 1) as f64
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricRow {
    pub seed: u64,
    pub noise_prob: f64,
    pub delta_rho: f64,
    pub delta_theta: f64,
    pub method: Method,
    pub slope_error_pct: f64,
    pub intercept_error: f64,
    pub pixel_separation_error: f64,
    pub support_count: usize,
    pub runtime_ms: f64,
}

/// Runs every method on one synthetic image. The shared Hough vote is timed
/// once and added to each method's refinement time.
pub fn run_trial(
    seed: u64,
    noise_prob: f64,
    (delta_rho, delta_theta): (f64, f64),
    methods: &[Method],
    solve: SolveOptions,
) -> anyhow::Result<Vec<MetricRow>> {
    let (image, truth) = gen_synthetic(&experiment_spec(seed, noise_prob))?;
    let config = DetectConfig { solve, ..DetectConfig::new(delta_rho, delta_theta) };
    let started = Instant::now();
    let voted = vote_image(&image, &config, 1)?;
    let vote_ms = started.elapsed().as_secs_f64() * 1e3;

    let mut rows = Vec::with_capacity(methods.len());
    for &method in methods {
        let row = |errors: LineErrors, support_count, runtime_ms| MetricRow {
            seed,
            noise_prob,
            delta_rho,
            delta_theta,
            method,
            slope_error_pct: errors.slope_error_pct,
            intercept_error: errors.intercept_error,
            pixel_separation_error: errors.pixel_separation_error,
            support_count,
            runtime_ms,
        };
        let failed = LineErrors {
            slope_error_pct: f64::INFINITY,
            intercept_error: f64::INFINITY,
            pixel_separation_error: f64::INFINITY,
        };
        let Some(peak) = voted.peaks.first() else {
            rows.push(row(failed, 0, vote_ms));
            continue;
        };
        let started = Instant::now();
        let detection = refine_peak(&voted.points, peak, &voted.params, method, &config);
        let runtime_ms = vote_ms + started.elapsed().as_secs_f64() * 1e3;
        rows.push(match detection {
            Ok(d) => row(line_errors(&d.line, &truth), d.support.len(), runtime_ms),
            Err(_) => row(failed, 0, runtime_ms),
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    /// Hough bin sizes swept at one noise level.
    Resolution,
    /// Noise levels swept at one bin size.
    Noise,
    /// One cell, all methods.
    Methods,
}

impl std::str::FromStr for ExperimentKind {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> anyhow::Result<Self> {
        match s {
            "resolution" => Ok(Self::Resolution),
            "noise" => Ok(Self::Noise),
            "methods" => Ok(Self::Methods),
            other => bail!("unknown experiment {other:?} (expected resolution, noise or methods)"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: ExperimentKind,
    pub seeds: Vec<u64>,
    pub noise_levels: Vec<f64>,
    /// `(delta_rho, delta_theta_deg)` pairs.
    pub bin_sizes: Vec<(f64, f64)>,
    pub methods: Vec<Method>,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Defaults per experiment: 20 seeds, all methods, and the sweep that
    /// experiment is about.
    pub fn preset(name: ExperimentKind) -> Self {
        let (noise_levels, bin_sizes) = match name {
            ExperimentKind::Resolution => (vec![0.001], [2.0, 5.0, 10.0, 20.0].iter().map(|&d| (d, d)).collect()),
            ExperimentKind::Noise => (vec![0.0005, 0.001, 0.002, 0.004, 0.006], vec![(20.0, 20.0)]),
            ExperimentKind::Methods => (vec![0.001], vec![(20.0, 20.0)]),
        };
        Self {
            name,
            seeds: (0..20).collect(),
            noise_levels,
            bin_sizes,
            methods: Method::ALL.to_vec(),
            output: None,
        }
    }

    pub fn from_toml(text: &str) -> anyhow::Result<Self> {
        let cfg: Self = toml::from_str(text).context("parsing experiment config")?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        if self.seeds.is_empty() || self.noise_levels.is_empty() || self.bin_sizes.is_empty() || self.methods.is_empty() {
            bail!("experiment lists (seeds, noise levels, bin sizes, methods) must be nonempty");
        }
        if let Some(p) = self.noise_levels.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            bail!("noise level {p} not in [0, 1]");
        }
        if let Some(b) = self.bin_sizes.iter().find(|(r, t)| !(*r > 0.0 && *t > 0.0)) {
            bail!("bin size {b:?} must be positive");
        }
        Ok(())
    }
}

pub fn run_experiment(config: &ExperimentConfig, solve: SolveOptions) -> anyhow::Result<Vec<MetricRow>> {
    config.validate()?;
    let mut rows = Vec::new();
    for &noise in &config.noise_levels {
        for &bins in &config.bin_sizes {
            for &seed in &config.seeds {
                rows.extend(run_trial(seed, noise, bins, &config.methods, solve)?);
            }
        }
    }
    Ok(rows)
}

/// Mean and standard deviation of one cell over its seeds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub noise_prob: f64,
    pub delta_rho: f64,
    pub delta_theta: f64,
    pub method: Method,
    pub trials: usize,
    pub mean_slope_error_pct: f64,
    pub std_slope_error_pct: f64,
    pub mean_pixel_separation_error: f64,
    pub std_pixel_separation_error: f64,
}

fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = if v.len() > 1 {
        v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, var.sqrt())
}

pub fn summarize(rows: &[MetricRow]) -> Vec<SummaryRow> {
    let mut cells: BTreeMap<(u64, u64, u64, Method), Vec<&MetricRow>> = BTreeMap::new();
    for r in rows {
        let key = (r.noise_prob.to_bits(), r.delta_rho.to_bits(), r.delta_theta.to_bits(), r.method);
        cells.entry(key).or_default().push(r);
    }
    cells
        .into_values()
        .map(|cell| {
            let slope: Vec<f64> = cell.iter().map(|r| r.slope_error_pct).collect();
            let sep: Vec<f64> = cell.iter().map(|r| r.pixel_separation_error).collect();
            let (mean_slope_error_pct, std_slope_error_pct) = mean_std(&slope);
            let (mean_pixel_separation_error, std_pixel_separation_error) = mean_std(&sep);
            SummaryRow {
                noise_prob: cell[0].noise_prob,
                delta_rho: cell[0].delta_rho,
                delta_theta: cell[0].delta_theta,
                method: cell[0].method,
                trials: cell.len(),
                mean_slope_error_pct,
                std_slope_error_pct,
                mean_pixel_separation_error,
                std_pixel_separation_error,
            }
        })
        .collect()
}

/// Looks up the summary for one cell.
pub fn cell(summary: &[SummaryRow], noise: f64, bins: (f64, f64), method: Method) -> Option<&SummaryRow> {
    summary
        .iter()
        .find(|s| s.noise_prob == noise && (s.delta_rho, s.delta_theta) == bins && s.method == method)
}

/// Writes metric rows; `with_timing = false` drops the runtime column so the
/// output is reproducible byte for byte.
pub fn write_metrics<W: Write>(writer: W, rows: &[MetricRow], with_timing: bool) -> anyhow::Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    let mut header = vec![
        "seed",
        "noise_prob",
        "delta_rho",
        "delta_theta",
        "method",
        "slope_error_pct",
        "intercept_error",
        "pixel_separation_error",
        "support_count",
    ];
    if with_timing {
        header.push("runtime_ms");
    }
    wtr.write_record(&header)?;
    for r in rows {
        let mut rec = vec![
            r.seed.to_string(),
            r.noise_prob.to_string(),
            r.delta_rho.to_string(),
            r.delta_theta.to_string(),
            r.method.to_string(),
            r.slope_error_pct.to_string(),
            r.intercept_error.to_string(),
            r.pixel_separation_error.to_string(),
            r.support_count.to_string(),
        ];
        if with_timing {
            rec.push(format!("{:.3}", r.runtime_ms));
        }
        wtr.write_record(&rec)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_summary<W: Write>(writer: W, summary: &[SummaryRow]) -> anyhow::Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    for s in summary {
        wtr.serialize(s)?;
    }
    wtr.flush()?;
    Ok(())
}
