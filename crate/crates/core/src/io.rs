//! CSV formats for clouds and persistence pairs.
//!
//! Clouds: one `x,y` per line, `#` starts a comment line, an optional `x,y`
//! header. Pairs: header `birth,death`, values with 15 significant digits.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use thiserror::Error;

use crate::analytics::Diagram;
use crate::delaunay::{Cloud, CloudError};
use crate::forest::PersistencePair;
use crate::geom::Point2;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error(transparent)]
    Cloud(#[from] CloudError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn reader<R: Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .quoting(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(r)
}

/// Reads rows of two numbers, skipping a header equal to `header`.
fn read_rows<R: Read>(r: R, header: [&str; 2]) -> Result<Vec<(u64, f64, f64)>, IoError> {
    let mut rows = Vec::new();
    let mut first = true;
    for record in reader(r).records() {
        let record = record.map_err(|e| IoError::Parse {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        // comments are skipped here rather than by the reader, which would
        // leave them out of its line count
        if record.iter().all(str::is_empty) || record[0].starts_with('#') {
            continue;
        }
        if std::mem::take(&mut first) && record.len() == 2 && record[0] == *header[0] && record[1] == *header[1] {
            continue;
        }
        if record.len() != 2 {
            return Err(IoError::Parse { line, message: format!("expected 2 fields, found {}", record.len()) });
        }
        let parse = |s: &str| {
            s.parse::<f64>().map_err(|_| IoError::Parse { line, message: format!("not a number: {s:?}") })
        };
        rows.push((line, parse(&record[0])?, parse(&record[1])?));
    }
    Ok(rows)
}

pub fn read_points<R: Read>(r: R) -> Result<Vec<Point2>, IoError> {
    let rows = read_rows(r, ["x", "y"])?;
    if let Some(&(line, x, y)) = rows.iter().find(|(_, x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(IoError::Parse { line, message: format!("non-finite coordinate ({x}, {y})") });
    }
    Ok(rows.into_iter().map(|(_, x, y)| Point2::new(x, y)).collect())
}

pub fn read_cloud(path: impl AsRef<Path>) -> Result<Cloud, IoError> {
    Ok(Cloud::new(read_points(File::open(path)?)?)?)
}

/// Writes points in shortest round-trip notation.
pub fn write_points<W: Write>(mut w: W, pts: &[Point2]) -> std::io::Result<()> {
    for p in pts {
        writeln!(w, "{},{}", p.x, p.y)?;
    }
    Ok(())
}

/// `v` rounded to 15 significant digits, printed without trailing zeros.
pub fn format_sig15(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    let rounded: f64 = format!("{v:.14e}").parse().expect("valid float");
    rounded.to_string()
}

pub fn write_pairs<W: Write>(mut w: W, d: &Diagram) -> std::io::Result<()> {
    writeln!(w, "birth,death")?;
    for p in d.pairs() {
        writeln!(w, "{},{}", format_sig15(p.birth), format_sig15(p.death))?;
    }
    Ok(())
}

pub fn read_pairs<R: Read>(r: R) -> Result<Diagram, IoError> {
    let rows = read_rows(r, ["birth", "death"])?;
    if let Some(&(line, b, d)) = rows.iter().find(|(_, b, d)| b.is_nan() || d.is_nan() || d < b) {
        return Err(IoError::Parse { line, message: format!("invalid pair ({b}, {d})") });
    }
    Ok(rows.into_iter().map(|(_, b, d)| PersistencePair::new(b, d)).collect())
}
