//! Command-line front end, experiment runner and benchmarks for `lms2d`.

pub mod bench;
pub mod experiment;

use lms2d::LmsError;
use lms2d_vision::VisionError;

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_DEGENERATE: u8 = 3;

/// Exit code for a failed command: 3 when the data itself is degenerate,
/// 2 for every other input or I/O problem.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        let lms = cause
            .downcast_ref::<LmsError>()
            .or_else(|| match cause.downcast_ref::<VisionError>() {
                Some(VisionError::Lms(e)) => Some(e),
                _ => None,
            });
        if matches!(lms, Some(LmsError::Degenerate(_) | LmsError::NoCandidate)) {
            return EXIT_DEGENERATE;
        }
        if matches!(cause.downcast_ref::<VisionError>(), Some(VisionError::DegenerateSupport(_))) {
            return EXIT_DEGENERATE;
        }
    }
    EXIT_INPUT
}
