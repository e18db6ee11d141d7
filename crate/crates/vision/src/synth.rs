//! Synthetic single-line images with recorded ground truth.
//!
//! Randomness comes from ChaCha8 seeded with the spec's seed. Stream 0
//! decides which raster pixels of the line are kept, stream 1 decides noise.
//! A uniform draw is `(next_u64 >> 11) * 2^-53` and a pixel is set when the
//! draw is below the probability. Noise draws are taken for every pixel in
//! row-major order, including raster positions, which are then skipped.

use std::io::Write;

use lms2d::{LineEq, Point2};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, VisionError};
use crate::image::GrayImage;

pub const SAMPLING_STREAM: u64 = 0;
pub const NOISE_STREAM: u64 = 1;

/// Uniform `[0, 1)` with 53 random bits.
pub fn unit_draw(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SyntheticLine {
    /// Segment between two points; clipped to the image.
    Endpoints { from: (f64, f64), to: (f64, f64) },
    /// Infinite line `y = slope * x + intercept`; clipped to the image.
    SlopeIntercept { slope: f64, intercept: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticSpec {
    pub width: usize,
    pub height: usize,
    pub line: SyntheticLine,
    pub sampling_prob: f64,
    pub noise_prob: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    /// 1024x1024, sampling 0.5, no noise.
    pub fn new(line: SyntheticLine, seed: u64) -> Self {
        Self {
            width: 1024,
            height: 1024,
            line,
            sampling_prob: 0.5,
            noise_prob: 0.0,
            seed,
        }
    }

    pub fn with_noise(mut self, noise_prob: f64) -> Self {
        self.noise_prob = noise_prob;
        self
    }

    pub fn with_sampling(mut self, sampling_prob: f64) -> Self {
        self.sampling_prob = sampling_prob;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(VisionError::InvalidParams("image must be nonempty".into()));
        }
        for (name, p) in [("sampling", self.sampling_prob), ("noise", self.noise_prob)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(VisionError::InvalidParams(format!("{name} probability {p} not in [0, 1]")));
            }
        }
        Ok(())
    }

    /// Integer endpoints of the line clipped to the pixel grid.
    pub fn raster_endpoints(&self) -> Result<[(i64, i64); 2]> {
        let (p0, d, t_range) = match self.line {
            SyntheticLine::Endpoints { from, to } => (from, (to.0 - from.0, to.1 - from.1), (0.0, 1.0)),
            SyntheticLine::SlopeIntercept { slope, intercept } => {
                ((0.0, intercept), (1.0, slope), (f64::NEG_INFINITY, f64::INFINITY))
            }
        };
        let outside = VisionError::LineOutsideImage { width: self.width, height: self.height };
        let (t0, t1) = clip(p0, d, t_range, (self.width - 1) as f64, (self.height - 1) as f64).ok_or(outside)?;
        let at = |t: f64| ((p0.0 + t * d.0).round() as i64, (p0.1 + t * d.1).round() as i64);
        let (a, b) = (at(t0), at(t1));
        if a == b {
            return Err(VisionError::InvalidParams("line collapses to a single pixel".into()));
        }
        Ok([a, b])
    }
}

/// Liang-Barsky clip of `p0 + t*d`, `t` in `range`, to `[0, xmax] x [0, ymax]`.
fn clip(p0: (f64, f64), d: (f64, f64), range: (f64, f64), xmax: f64, ymax: f64) -> Option<(f64, f64)> {
    let (mut lo, mut hi) = range;
    for (p, q) in [(-d.0, p0.0), (d.0, xmax - p0.0), (-d.1, p0.1), (d.1, ymax - p0.1)] {
        if p == 0.0 {
            if q < 0.0 {
                return None;
            }
        } else {
            let r = q / p;
            if p < 0.0 {
                lo = lo.max(r);
            } else {
                hi = hi.min(r);
            }
        }
    }
    (lo <= hi && lo.is_finite() && hi.is_finite()).then_some((lo, hi))
}

/// Pixels of the integer segment, endpoints included (Bresenham walk).
pub fn bresenham(a: (i64, i64), b: (i64, i64)) -> Vec<(i64, i64)> {
    let (dx, dy) = ((b.0 - a.0).abs(), -(b.1 - a.1).abs());
    let (sx, sy) = ((b.0 - a.0).signum(), (b.1 - a.1).signum());
    let mut err = dx + dy;
    let (mut x, mut y) = a;
    let mut out = Vec::with_capacity((dx.max(-dy) + 1) as usize);
    loop {
        out.push((x, y));
        if (x, y) == b {
            break;
        }
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            x += sx;
        }
        if e2 <= dx {
            err += dx;
            y += sy;
        }
    }
    out
}

/// The generator's record of what it drew.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub seed: u64,
    pub endpoints: [(i64, i64); 2],
    /// Normal form `x cos(theta) + y sin(theta) = rho`, theta in degrees in `[0, 180)`.
    pub rho: f64,
    pub theta_deg: f64,
    pub raster_len: usize,
    pub line_pixels: Vec<(usize, usize)>,
    pub noise_pixels: Vec<(usize, usize)>,
}

impl GroundTruth {
    /// `y = slope * x + intercept` through the endpoints; `None` when vertical.
    pub fn line(&self) -> Option<LineEq> {
        let [(x0, y0), (x1, y1)] = self.endpoints;
        LineEq::through(Point2::new(x0 as f64, y0 as f64), Point2::new(x1 as f64, y1 as f64))
    }

    pub fn emitted_count(&self) -> usize {
        self.line_pixels.len() + self.noise_pixels.len()
    }

    /// Sidecar CSV: a `#` comment with the line parameters and seed, then
    /// `kind,x,y` rows for line and noise pixels.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let [(x0, y0), (x1, y1)] = self.endpoints;
        let (slope, intercept) = self.line().map_or((f64::INFINITY, f64::NAN), |l| (l.slope, l.intercept));
        writeln!(
            w,
            "# seed={} x0={x0} y0={y0} x1={x1} y1={y1} slope={slope} intercept={intercept} rho={} theta={}",
            self.seed, self.rho, self.theta_deg
        )?;
        writeln!(w, "kind,x,y")?;
        for (kind, pixels) in [("line", &self.line_pixels), ("noise", &self.noise_pixels)] {
            for (x, y) in pixels {
                writeln!(w, "{kind},{x},{y}")?;
            }
        }
        Ok(())
    }
}

/// Normal form of the line through two distinct points.
pub fn polar_through(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len = dx.hypot(dy);
    let (mut nx, mut ny) = (-dy / len, dx / len);
    if ny < 0.0 || (ny == 0.0 && nx < 0.0) {
        nx = -nx;
        ny = -ny;
    }
    (nx * a.0 + ny * a.1, ny.atan2(nx).to_degrees() + 0.0)
}

pub fn gen_synthetic(spec: &SyntheticSpec) -> Result<(GrayImage, GroundTruth)> {
    spec.validate()?;
    let endpoints = spec.raster_endpoints()?;
    let raster = bresenham(endpoints[0], endpoints[1]);
    let (w, h) = (spec.width, spec.height);
    let mut image = GrayImage::new(w, h);
    let mut on_raster = vec![false; w * h];

    let mut sampling = stream_rng(spec.seed, SAMPLING_STREAM);
    let mut line_pixels = Vec::new();
    for &(x, y) in &raster {
        let (x, y) = (x as usize, y as usize);
        on_raster[y * w + x] = true;
        if unit_draw(&mut sampling) < spec.sampling_prob {
            image.set(x, y, 255);
            line_pixels.push((x, y));
        }
    }

    let mut noise = stream_rng(spec.seed, NOISE_STREAM);
    let mut noise_pixels = Vec::new();
    for y in 0..h {
        for x in 0..w {
            let hit = unit_draw(&mut noise) < spec.noise_prob;
            if hit && !on_raster[y * w + x] {
                image.set(x, y, 255);
                noise_pixels.push((x, y));
            }
        }
    }

    let [(x0, y0), (x1, y1)] = endpoints;
    let (rho, theta_deg) = polar_through((x0 as f64, y0 as f64), (x1 as f64, y1 as f64));
    let truth = GroundTruth {
        seed: spec.seed,
        endpoints,
        rho,
        theta_deg,
        raster_len: raster.len(),
        line_pixels,
        noise_pixels,
    };
    Ok((image, truth))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diagonal_spec(seed: u64) -> SyntheticSpec {
        SyntheticSpec {
            width: 64,
            height: 48,
            ..SyntheticSpec::new(SyntheticLine::Endpoints { from: (2.0, 3.0), to: (60.0, 40.0) }, seed)
        }
    }

    #[test]
    fn bresenham_is_connected_and_complete() {
        for b in [(10, 3), (3, 10), (-7, 2), (0, -5), (6, 6)] {
            let px = bresenham((0, 0), b);
            assert_eq!(px.len() as i64, b.0.abs().max(b.1.abs()) + 1);
            assert_eq!(px.first(), Some(&(0, 0)));
            assert_eq!(px.last(), Some(&b));
            for w in px.windows(2) {
                assert!((w[1].0 - w[0].0).abs() <= 1 && (w[1].1 - w[0].1).abs() <= 1);
            }
        }
    }

    #[test]
    fn full_sampling_without_noise_is_the_raster() {
        let spec = diagonal_spec(3).with_sampling(1.0);
        let (img, gt) = gen_synthetic(&spec).unwrap();
        let raster = bresenham(gt.endpoints[0], gt.endpoints[1]);
        assert_eq!(gt.line_pixels.len(), raster.len());
        assert!(gt.noise_pixels.is_empty());
        let white = img.as_raw().iter().filter(|&&v| v == 255).count();
        assert_eq!(white, raster.len());
    }

    #[test]
    fn same_seed_same_image() {
        let spec = diagonal_spec(9).with_noise(0.05);
        assert_eq!(gen_synthetic(&spec).unwrap(), gen_synthetic(&spec).unwrap());
        let other = SyntheticSpec { seed: 10, ..spec };
        assert_ne!(gen_synthetic(&spec).unwrap().0, gen_synthetic(&other).unwrap().0);
    }

    #[test]
    fn noise_avoids_raster() {
        let spec = diagonal_spec(4).with_noise(0.5).with_sampling(0.0);
        let (_, gt) = gen_synthetic(&spec).unwrap();
        let raster = bresenham(gt.endpoints[0], gt.endpoints[1]);
        assert!(gt.line_pixels.is_empty());
        assert!(!gt.noise_pixels.is_empty());
        for p in &gt.noise_pixels {
            assert!(!raster.contains(&(p.0 as i64, p.1 as i64)));
        }
    }

    #[test]
    fn slope_intercept_is_clipped() {
        let spec = SyntheticSpec {
            width: 100,
            height: 100,
            ..SyntheticSpec::new(SyntheticLine::SlopeIntercept { slope: 0.5, intercept: 10.0 }, 1)
        };
        assert_eq!(spec.raster_endpoints().unwrap(), [(0, 10), (99, 60)]);
        let outside = SyntheticSpec {
            line: SyntheticLine::SlopeIntercept { slope: 0.0, intercept: 200.0 },
            ..spec
        };
        assert!(matches!(gen_synthetic(&outside), Err(VisionError::LineOutsideImage { .. })));
    }

    #[test]
    fn invalid_probability() {
        let spec = diagonal_spec(1).with_noise(1.5);
        assert!(matches!(gen_synthetic(&spec), Err(VisionError::InvalidParams(_))));
    }

    #[test]
    fn polar_forms() {
        let (rho, theta) = polar_through((5.0, 0.0), (5.0, 10.0));
        assert!((rho - 5.0).abs() < 1e-12 && theta.abs() < 1e-12);
        let (rho, theta) = polar_through((0.0, 7.0), (10.0, 7.0));
        assert!((rho - 7.0).abs() < 1e-12 && (theta - 90.0).abs() < 1e-12);
        // y = x: normal at 135 degrees, through the origin.
        let (rho, theta) = polar_through((0.0, 0.0), (3.0, 3.0));
        assert!(rho.abs() < 1e-12 && (theta - 135.0).abs() < 1e-12);
    }

    #[test]
    fn sidecar_layout() {
        let (_, gt) = gen_synthetic(&diagonal_spec(2).with_noise(0.01)).unwrap();
        let mut buf = Vec::new();
        gt.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert!(lines.next().unwrap().starts_with("# seed=2 x0=2 y0=3 x1=60 y1=40"));
        assert_eq!(lines.next(), Some("kind,x,y"));
        assert_eq!(lines.count(), gt.emitted_count());
    }
}
