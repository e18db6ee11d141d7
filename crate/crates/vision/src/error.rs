use thiserror::Error;

use lms2d::LmsError;

#[derive(Debug, Error)]
pub enum VisionError {
    #[error("pgm parse error at byte {offset}: {message}")]
    Pgm { offset: usize, message: String },
    #[error("line does not intersect the {width}x{height} image")]
    LineOutsideImage { width: usize, height: usize },
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
    #[error("degenerate support: {0}")]
    DegenerateSupport(String),
    #[error(transparent)]
    Lms(#[from] LmsError),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, VisionError>;
