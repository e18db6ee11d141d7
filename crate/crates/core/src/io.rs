//! CSV formats: point sets (`x,y`) and fit rows
//! (`slope,intercept,lms_value,slab_height,coverage`).

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::Point2;
use crate::solver::LmsFit;

pub fn read_points<R: Read>(reader: R) -> Result<Vec<Point2>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let mut points = Vec::new();
    for row in rdr.deserialize() {
        points.push(row?);
    }
    Ok(points)
}

pub fn write_points<W: Write>(writer: W, points: &[Point2]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    for p in points {
        wtr.serialize(p)?;
    }
    wtr.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitRow {
    pub slope: f64,
    pub intercept: f64,
    pub lms_value: f64,
    pub slab_height: f64,
    pub coverage: usize,
}

impl From<&LmsFit> for FitRow {
    fn from(fit: &LmsFit) -> Self {
        Self {
            slope: fit.line.slope,
            intercept: fit.line.intercept,
            lms_value: fit.lms_value,
            slab_height: fit.slab_height,
            coverage: fit.coverage,
        }
    }
}

/// Writes a header and one row.
pub fn write_fit<W: Write>(writer: W, fit: &LmsFit) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.serialize(FitRow::from(fit))?;
    wtr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::solve_lms;

    #[test]
    fn reads_header_and_rows() {
        let data = "x,y\n0,1\n 1.5 , -2e3\n";
        let pts = read_points(data.as_bytes()).unwrap();
        assert_eq!(pts, vec![Point2::new(0.0, 1.0), Point2::new(1.5, -2000.0)]);
    }

    #[test]
    fn malformed_row_is_an_error() {
        assert!(read_points("x,y\n1,abc\n".as_bytes()).is_err());
    }

    #[test]
    fn points_round_trip_exactly() {
        let pts = vec![Point2::new(0.1, 1.0 / 3.0), Point2::new(-7e-300, 12345.678)];
        let mut buf = Vec::new();
        write_points(&mut buf, &pts).unwrap();
        assert_eq!(read_points(buf.as_slice()).unwrap(), pts);
    }

    #[test]
    fn fit_row_layout() {
        let pts = [Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(0.0, 1.0), Point2::new(1.0, 1.0)];
        let fit = solve_lms(&pts, Some(3)).unwrap();
        let mut buf = Vec::new();
        write_fit(&mut buf, &fit).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "slope,intercept,lms_value,slab_height,coverage\n0.0,0.5,0.25,1.0,3\n"
        );
    }
}
