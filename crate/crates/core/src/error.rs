use thiserror::Error;

/// Why a point set cannot be fitted with a non-vertical line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Degeneracy {
    /// Fewer than three points.
    TooFewPoints(usize),
    /// Fewer than two distinct x-coordinates; only a vertical line fits.
    SingleAbscissa,
}

impl std::fmt::Display for Degeneracy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Degeneracy::TooFewPoints(n) => write!(f, "need at least 3 points, got {n}"),
            Degeneracy::SingleAbscissa => {
                write!(f, "fewer than two distinct x-coordinates (vertical data)")
            }
        }
    }
}

#[derive(Debug, Error)]
pub enum LmsError {
    #[error("invalid input: point {index} has a non-finite coordinate")]
    NonFinite { index: usize },
    #[error("degenerate input: {0}")]
    Degenerate(Degeneracy),
    #[error("coverage q={q} out of range for {n} points (need 2 <= q <= n)")]
    InvalidCoverage { q: usize, n: usize },
    #[error("internal error: no anchored bracelet found")]
    NoCandidate,
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, LmsError>;
