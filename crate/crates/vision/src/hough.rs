//! Polar Hough voting, peak picking and peak support.
//!
//! A point votes once per theta bin, at the bin's center angle, for the rho
//! bin `floor((rho + D) / delta_rho)` where `rho = x cos(theta) + y sin(theta)`
//! and `D` is the image diagonal. Support of a peak is recovered by re-running
//! that vote for the peak's theta bin, so a point supports a peak exactly when
//! it voted for it.

use lms2d::Point2;

use crate::error::{Result, VisionError};

#[derive(Debug, Clone, PartialEq)]
pub struct HoughParams {
    pub delta_rho: f64,
    pub delta_theta_deg: f64,
    /// Half-extent `D` of the rho axis.
    pub max_rho: f64,
    n_rho: usize,
    n_theta: usize,
    cos_sin: Vec<(f64, f64)>,
}

impl HoughParams {
    pub fn new(delta_rho: f64, delta_theta_deg: f64, width: usize, height: usize) -> Result<Self> {
        if !(delta_rho > 0.0 && delta_rho.is_finite()) || !(delta_theta_deg > 0.0 && delta_theta_deg <= 180.0) {
            return Err(VisionError::InvalidParams(format!(
                "bin sizes must be positive (delta_rho={delta_rho}, delta_theta={delta_theta_deg})"
            )));
        }
        let max_rho = (width as f64).hypot(height as f64);
        let n_rho = ((2.0 * max_rho / delta_rho).ceil() as usize).max(1);
        let n_theta = ((180.0 / delta_theta_deg).ceil() as usize).max(1);
        let cos_sin = (0..n_theta)
            .map(|t| {
                let th = ((t as f64 + 0.5) * delta_theta_deg).to_radians();
                (th.cos(), th.sin())
            })
            .collect();
        Ok(Self { delta_rho, delta_theta_deg, max_rho, n_rho, n_theta, cos_sin })
    }

    pub fn rho_bins(&self) -> usize {
        self.n_rho
    }

    pub fn theta_bins(&self) -> usize {
        self.n_theta
    }

    pub fn theta_center(&self, theta_bin: usize) -> f64 {
        (theta_bin as f64 + 0.5) * self.delta_theta_deg
    }

    pub fn rho_center(&self, rho_bin: usize) -> f64 {
        -self.max_rho + (rho_bin as f64 + 0.5) * self.delta_rho
    }

    pub fn rho_bin(&self, rho: f64) -> usize {
        let b = ((rho + self.max_rho) / self.delta_rho).floor();
        (b.max(0.0) as usize).min(self.n_rho - 1)
    }

    /// Rho bin that `p` votes for in `theta_bin`.
    #[inline]
    pub fn vote_bin(&self, p: Point2, theta_bin: usize) -> usize {
        let (c, s) = self.cos_sin[theta_bin];
        self.rho_bin(p.x * c + p.y * s)
    }
}

/// Vote grid indexed `(rho_bin, theta_bin)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HoughAccumulator {
    params: HoughParams,
    votes: Vec<u32>,
}

impl HoughAccumulator {
    pub fn params(&self) -> &HoughParams {
        &self.params
    }

    pub fn votes(&self, rho_bin: usize, theta_bin: usize) -> u32 {
        self.votes[rho_bin * self.params.n_theta + theta_bin]
    }

    pub fn total_votes(&self) -> u64 {
        self.votes.iter().map(|&v| u64::from(v)).sum()
    }

    /// Bin with the most votes; ties go to the lowest `(rho_bin, theta_bin)`.
    pub fn argmax(&self) -> Option<(usize, usize, u32)> {
        let (k, &v) = self
            .votes
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))?;
        (v > 0).then_some((k / self.params.n_theta, k % self.params.n_theta, v))
    }
}

pub fn hough_vote(points: &[Point2], params: &HoughParams) -> HoughAccumulator {
    let n_theta = params.n_theta;
    let mut votes = vec![0u32; params.n_rho * n_theta];
    for &p in points {
        for t in 0..n_theta {
            votes[params.vote_bin(p, t) * n_theta + t] += 1;
        }
    }
    HoughAccumulator { params: params.clone(), votes }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub rho_bin: usize,
    pub theta_bin: usize,
    pub votes: u32,
    pub rho_center: f64,
    pub theta_center: f64,
}

/// Local maxima over the 8-neighbourhood with at least `min_votes` votes,
/// strongest first (ties by `(rho_bin, theta_bin)`), at most `max_peaks`.
///
/// On a plateau only the cell that comes first in row-major order is kept:
/// a cell must strictly beat earlier neighbours and at least match later ones.
pub fn find_peaks(acc: &HoughAccumulator, max_peaks: usize, min_votes: u32) -> Vec<Peak> {
    let p = &acc.params;
    let (nr, nt) = (p.n_rho as isize, p.n_theta as isize);
    let mut peaks = Vec::new();
    for r in 0..nr {
        for t in 0..nt {
            let v = acc.votes(r as usize, t as usize);
            if v == 0 || v < min_votes {
                continue;
            }
            let mut is_peak = true;
            'nb: for dr in -1..=1isize {
                for dt in -1..=1isize {
                    let (rr, tt) = (r + dr, t + dt);
                    if (dr, dt) == (0, 0) || rr < 0 || tt < 0 || rr >= nr || tt >= nt {
                        continue;
                    }
                    let w = acc.votes(rr as usize, tt as usize);
                    let earlier = (dr, dt) < (0, 0);
                    if w > v || (earlier && w == v) {
                        is_peak = false;
                        break 'nb;
                    }
                }
            }
            if is_peak {
                peaks.push(Peak {
                    rho_bin: r as usize,
                    theta_bin: t as usize,
                    votes: v,
                    rho_center: p.rho_center(r as usize),
                    theta_center: p.theta_center(t as usize),
                });
            }
        }
    }
    peaks.sort_by(|a, b| b.votes.cmp(&a.votes).then((a.rho_bin, a.theta_bin).cmp(&(b.rho_bin, b.theta_bin))));
    peaks.truncate(max_peaks);
    peaks
}

/// Points whose vote in the peak's theta bin landed in the peak's rho bin.
pub fn supporting_points(points: &[Point2], peak: &Peak, params: &HoughParams) -> Vec<Point2> {
    points
        .iter()
        .copied()
        .filter(|&p| params.vote_bin(p, peak.theta_bin) == peak.rho_bin)
        .collect()
}
