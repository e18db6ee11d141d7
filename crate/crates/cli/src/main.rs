use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use lms2d::io::{read_points, write_fit};
use lms2d::{solve_lms_with, Backend, CutSort, SolveOptions};
use lms2d_cli::bench::{run_bench, validate_sizes, write_bench};
use lms2d_cli::experiment::{experiment_line, run_experiment, summarize, write_metrics, write_summary, ExperimentConfig, ExperimentKind};
use lms2d_cli::{exit_code, EXIT_USAGE};
use lms2d_vision::detect::write_detections;
use lms2d_vision::{detect_lines, gen_synthetic, read_pgm, write_pgm, DetectConfig, FeatureExtractor, Method, SyntheticLine, SyntheticSpec};

#[derive(Parser)]
#[command(name = "lms2d", version, about = "Exact least-median-of-squares line fitting and Hough refinement")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendName {
    Seq,
    Par,
}

#[derive(Clone, Copy, ValueEnum)]
enum SortName {
    Comparison,
    Bitonic,
}

#[derive(Args)]
struct SolverArgs {
    /// Execution backend.
    #[arg(long, value_enum, default_value = "seq")]
    backend: BackendName,
    /// Worker threads for the parallel backend (default: LMS2D_WORKERS or all cores).
    #[arg(long)]
    workers: Option<usize>,
    /// Sort used on each vertical cut.
    #[arg(long, value_enum, default_value = "comparison")]
    sort: SortName,
    /// Store all pairwise intersections before scanning them.
    #[arg(long)]
    materialize: bool,
}

impl SolverArgs {
    fn backend(&self) -> Backend {
        match self.backend {
            BackendName::Seq => Backend::Sequential,
            BackendName::Par => Backend::Parallel { workers: self.workers },
        }
    }

    fn options(&self) -> SolveOptions {
        SolveOptions {
            coverage: None,
            backend: self.backend(),
            sort: match self.sort {
                SortName::Comparison => CutSort::Comparison,
                SortName::Bitonic => CutSort::Bitonic,
            },
            materialize: self.materialize,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Fit an LMS line to a CSV of x,y points.
    Solve {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        /// Points the slab must cover (default floor(n/2)+1).
        #[arg(long)]
        q: Option<usize>,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Detect lines in a binary PGM image.
    Detect {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, default_value_t = 2.0)]
        drho: f64,
        /// Theta bin size in degrees.
        #[arg(long, default_value_t = 2.0)]
        dtheta: f64,
        #[arg(long, default_value = "lms")]
        method: Method,
        #[arg(long, default_value_t = 1)]
        max_peaks: usize,
        /// Intensity threshold for feature pixels.
        #[arg(long, default_value_t = 128)]
        threshold: u8,
        /// LMS coverage (default: half the peak support plus one).
        #[arg(long)]
        q: Option<usize>,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Write a synthetic single-line image and its ground truth.
    Synth {
        #[arg(long)]
        output: PathBuf,
        /// Ground-truth CSV (default: output path with .csv extension).
        #[arg(long)]
        truth: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        #[arg(long, default_value_t = 0.5)]
        sampling: f64,
        #[arg(long, default_value_t = 1024)]
        width: usize,
        #[arg(long, default_value_t = 1024)]
        height: usize,
        /// Segment `x0,y0,x1,y1`; default is a random line drawn from the seed.
        #[arg(long, value_parser = parse_segment)]
        line: Option<[f64; 4]>,
    },
    /// Run an accuracy experiment and write per-trial metrics.
    Experiment {
        /// Experiment preset.
        #[arg(long, value_parser = parse_kind, required_unless_present = "config")]
        name: Option<ExperimentKind>,
        /// TOML file with name, seeds, noise_levels, bin_sizes, methods and optionally output.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
        /// Also write per-cell mean and standard deviation here.
        #[arg(long)]
        summary: Option<PathBuf>,
        /// First seed; trials use consecutive seeds.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, requires = "seed")]
        trials: Option<u64>,
        /// Noise levels (overrides the preset).
        #[arg(long, value_delimiter = ',')]
        noise: Option<Vec<f64>>,
        #[arg(long, requires = "dtheta")]
        drho: Option<f64>,
        #[arg(long, requires = "drho")]
        dtheta: Option<f64>,
        #[arg(long, value_delimiter = ',')]
        method: Option<Vec<Method>>,
        /// Leave out the runtime column so output is reproducible byte for byte.
        #[arg(long)]
        no_timing: bool,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Time the solver over input sizes and backends.
    Bench {
        #[arg(long, value_delimiter = ',', default_value = "64,128,256")]
        sizes: Vec<usize>,
        #[arg(long = "backend", value_delimiter = ',', default_value = "seq,par")]
        backends: Vec<BackendName>,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long, default_value_t = 3)]
        repeats: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn parse_kind(s: &str) -> Result<ExperimentKind, String> {
    s.parse().map_err(|e: anyhow::Error| e.to_string())
}

fn parse_segment(s: &str) -> Result<[f64; 4], String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}")))
        .collect::<Result<_, _>>()?;
    v.try_into().map_err(|v: Vec<f64>| format!("expected x0,y0,x1,y1, got {} values", v.len()))
}

fn sink(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run(command: Command) -> anyhow::Result<()> {
    match command {
        Command::Solve { input, output, q, solver } => {
            let file = File::open(&input).with_context(|| format!("opening {}", input.display()))?;
            let points = read_points(BufReader::new(file)).with_context(|| format!("reading {}", input.display()))?;
            let opts = SolveOptions { coverage: q, ..solver.options() };
            let fit = solve_lms_with(&points, &opts)?;
            let mut out = sink(output.as_deref())?;
            write_fit(&mut out, &fit)?;
            out.flush()?;
        }
        Command::Detect { input, output, drho, dtheta, method, max_peaks, threshold, q, solver } => {
            let image = read_pgm(&input).with_context(|| format!("reading {}", input.display()))?;
            let config = DetectConfig {
                extractor: FeatureExtractor::Intensity(threshold),
                coverage: q,
                solve: solver.options(),
                ..DetectConfig::new(drho, dtheta)
            };
            let detections = detect_lines(&image, &config, method, max_peaks)?;
            let mut out = sink(output.as_deref())?;
            write_detections(&mut out, &detections)?;
            out.flush()?;
        }
        Command::Synth { output, truth, seed, noise, sampling, width, height, line } => {
            let line = match line {
                Some([x0, y0, x1, y1]) => SyntheticLine::Endpoints { from: (x0, y0), to: (x1, y1) },
                None => experiment_line(seed, width, height),
            };
            let spec = SyntheticSpec { width, height, line, sampling_prob: sampling, noise_prob: noise, seed };
            let (image, gt) = gen_synthetic(&spec)?;
            write_pgm(&output, &image)?;
            let truth = truth.unwrap_or_else(|| output.with_extension("csv"));
            let mut out = sink(Some(&truth))?;
            gt.write_csv(&mut out)?;
            out.flush()?;
        }
        Command::Experiment { name, config, output, summary, seed, trials, noise, drho, dtheta, method, no_timing, solver } => {
            let mut cfg = match &config {
                Some(path) => {
                    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                    ExperimentConfig::from_toml(&text)?
                }
                None => ExperimentConfig::preset(name.expect("clap requires name or config")),
            };
            if let Some(first) = seed {
                cfg.seeds = (first..first + trials.unwrap_or(cfg.seeds.len() as u64)).collect();
            }
            if let Some(levels) = noise {
                cfg.noise_levels = levels;
            }
            if let (Some(r), Some(t)) = (drho, dtheta) {
                cfg.bin_sizes = vec![(r, t)];
            }
            if let Some(methods) = method {
                cfg.methods = methods;
            }
            if output.is_some() {
                cfg.output = output;
            }
            let rows = run_experiment(&cfg, solver.options())?;
            let mut out = sink(cfg.output.as_deref())?;
            write_metrics(&mut out, &rows, !no_timing)?;
            out.flush()?;
            if let Some(path) = summary {
                let mut out = sink(Some(&path))?;
                write_summary(&mut out, &summarize(&rows))?;
                out.flush()?;
            }
        }
        Command::Bench { sizes, backends, workers, repeats, seed, output } => {
            validate_sizes(&sizes)?;
            let backends: Vec<Backend> = backends
                .iter()
                .map(|b| match b {
                    BackendName::Seq => Backend::Sequential,
                    BackendName::Par => Backend::Parallel { workers },
                })
                .collect();
            let rows = run_bench(&sizes, &backends, repeats, seed, SolveOptions::default())?;
            let mut out = sink(output.as_deref())?;
            write_bench(&mut out, &rows)?;
            out.flush()?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
