use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use lms2d::io::write_points;
use lms2d_cli::bench::bench_points;

fn lms2d(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lms2d")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn write_csv(path: &Path, rows: &str) {
    fs::write(path, format!("x,y\n{rows}")).unwrap();
}

#[test]
fn collinear_input_fits_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("pts.csv");
    write_csv(&input, "0,1\n1,3\n2,5\n3,7\n4,9\n");
    let out = lms2d(&["solve", "--input", input.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("slope,intercept,lms_value,slab_height,coverage"));
    assert_eq!(lines.next(), Some("2.0,1.0,0.0,0.0,3"));
}

#[test]
fn two_points_are_degenerate() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("pts.csv");
    write_csv(&input, "0,1\n1,3\n");
    let out = lms2d(&["solve", "--input", input.to_str().unwrap()]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("degenerate"));
}

#[test]
fn input_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.csv");
    assert_eq!(code(&lms2d(&["solve", "--input", missing.to_str().unwrap()])), 2);
    let bad = dir.path().join("bad.csv");
    write_csv(&bad, "0,1\n1,abc\n2,5\n");
    assert_eq!(code(&lms2d(&["solve", "--input", bad.to_str().unwrap()])), 2);
    let ok = dir.path().join("ok.csv");
    write_csv(&ok, "0,1\n1,2\n2,5\n");
    assert_eq!(code(&lms2d(&["solve", "--input", ok.to_str().unwrap(), "--q", "9"])), 2);
    assert_eq!(code(&lms2d(&["bench", "--sizes", "100"])), 2);
    let not_pgm = dir.path().join("img.pgm");
    fs::write(&not_pgm, b"P2\n1 1\n255\n0").unwrap();
    assert_eq!(code(&lms2d(&["detect", "--input", not_pgm.to_str().unwrap()])), 2);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&lms2d(&[])), 1);
    assert_eq!(code(&lms2d(&["solve"])), 1);
    assert_eq!(code(&lms2d(&["solve", "--input", "x", "--backend", "gpu"])), 1);
    assert_eq!(code(&lms2d(&["experiment", "--name", "bogus"])), 1);
    assert_eq!(code(&lms2d(&["--help"])), 0);
    assert_eq!(code(&lms2d(&["--version"])), 0);
}

#[test]
fn seq_and_par_write_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("pts.csv");
    write_points(fs::File::create(&input).unwrap(), &bench_points(64, 42)).unwrap();
    let input = input.to_str().unwrap();
    let seq = lms2d(&["solve", "--input", input, "--backend", "seq"]);
    assert_eq!(code(&seq), 0);
    for workers in ["1", "3", "4"] {
        let par = lms2d(&["solve", "--input", input, "--backend", "par", "--workers", workers]);
        assert_eq!(code(&par), 0);
        assert_eq!(seq.stdout, par.stdout);
    }
    let bitonic = lms2d(&["solve", "--input", input, "--sort", "bitonic", "--materialize"]);
    assert_eq!(seq.stdout, bitonic.stdout);
}

#[test]
fn synth_then_detect_recovers_line() {
    let dir = tempfile::tempdir().unwrap();
    let img = dir.path().join("line.pgm");
    let out = lms2d(&[
        "synth", "--output", img.to_str().unwrap(), "--seed", "9", "--noise", "0.001",
        "--width", "256", "--height", "256", "--line", "10,20,240,200",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let truth = fs::read_to_string(img.with_extension("csv")).unwrap();
    assert!(truth.starts_with("# seed=9"));

    let out = lms2d(&["detect", "--input", img.to_str().unwrap(), "--drho", "5", "--dtheta", "5", "--method", "lms"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(
        rdr.headers().unwrap().iter().collect::<Vec<_>>(),
        ["method", "rho", "theta", "slope", "intercept", "lms_value", "support_count"]
    );
    let row = rdr.records().next().unwrap().unwrap();
    assert_eq!(&row[0], "LMS");
    let slope: f64 = row[3].parse().unwrap();
    let intercept: f64 = row[4].parse().unwrap();
    let want = 180.0 / 230.0;
    assert!((slope - want).abs() / want < 0.02, "slope {slope}");
    assert!((slope * 128.0 + intercept - (20.0 + want * 118.0)).abs() < 2.0);
}

#[test]
fn experiment_is_reproducible_without_timing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    fs::write(
        &cfg,
        "name = \"methods\"\nseeds = [1, 2]\nnoise_levels = [0.001]\nbin_sizes = [[20.0, 20.0]]\nmethods = [\"SHT\", \"LMS\"]\n",
    )
    .unwrap();
    let run = |out: &Path, extra: &[&str]| {
        let mut args = vec!["experiment", "--config", cfg.to_str().unwrap(), "--output", out.to_str().unwrap(), "--no-timing"];
        args.extend_from_slice(extra);
        let o = lms2d(&args);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        fs::read(out).unwrap()
    };
    let a = run(&dir.path().join("a.csv"), &[]);
    let b = run(&dir.path().join("b.csv"), &["--backend", "par", "--workers", "2"]);
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert_eq!(text.lines().count(), 1 + 2 * 2);
    assert!(!text.lines().next().unwrap().contains("runtime_ms"));

    let timed = dir.path().join("t.csv");
    let summary = dir.path().join("s.csv");
    let o = lms2d(&["experiment", "--config", cfg.to_str().unwrap(), "--output", timed.to_str().unwrap(), "--summary", summary.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let timed = fs::read_to_string(timed).unwrap();
    assert!(timed.lines().next().unwrap().ends_with("runtime_ms"));
    for line in timed.lines().skip(1) {
        let ms: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!(ms > 0.0);
    }
    assert_eq!(fs::read_to_string(summary).unwrap().lines().count(), 1 + 2);

    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "name = \"methods\"\nseeds = []\n").unwrap();
    assert_eq!(code(&lms2d(&["experiment", "--config", bad.to_str().unwrap()])), 2);
}

#[test]
fn bench_writes_one_row_per_cell() {
    let out = lms2d(&["bench", "--sizes", "64", "--backend", "seq,par", "--workers", "2", "--repeats", "1"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[0].starts_with("n,backend,workers,repeats,slope,intercept,lms_value,median_ms"));
    // Identical fits from both backends: only timing columns may differ.
    let fit = |r: &str| r.split(',').skip(4).take(3).collect::<Vec<_>>().join(",");
    assert_eq!(fit(rows[1]), fit(rows[2]));
}
