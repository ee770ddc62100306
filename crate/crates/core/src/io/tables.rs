//! CSV tables emitted by the tools and their readers.
//!
//! Floats are written in Rust's shortest round-trip notation, so every table
//! re-reads to bit-identical values.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::interference_engine::{FringePattern, VisibilityStats};
use crate::timing_logic::LogicTrace;

pub const VISIBILITY_CURVE_HEADER: [&str; 2] = ["delta_l_m", "visibility"];
pub const FRINGE_HEADER: [&str; 2] = ["x_m", "intensity"];
pub const STATS_HEADER: [&str; 4] = ["N", "occurrence_probability", "mean_duration_s", "stderr"];
pub const TRACE_HEADER: [&str; 5] = ["t_s", "d1", "d2", "and", "xor"];

fn write_rows<const C: usize>(
    path: &Path,
    header: [&str; C],
    rows: impl IntoIterator<Item = [String; C]>,
) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "{}", header.join(","))?;
    for row in rows {
        writeln!(out, "{}", row.join(","))?;
    }
    out.flush()?;
    Ok(())
}

fn read_rows<const C: usize>(path: &Path, header: [&str; C]) -> Result<Vec<[f64; C]>> {
    if !path.exists() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    let malformed = |message: String| Error::Malformed {
        path: path.to_path_buf(),
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| malformed(e.to_string()))?;
    let found = reader.headers().map_err(|e| malformed(e.to_string()))?;
    if found.iter().ne(header.iter().copied()) {
        return Err(malformed(format!("expected header `{}`", header.join(","))));
    }
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| malformed(e.to_string()))?;
        let mut row = [0.0; C];
        for (c, cell) in row.iter_mut().enumerate() {
            let raw = record.get(c).unwrap_or("");
            *cell = raw.parse().map_err(|_| Error::NonNumeric {
                path: path.to_path_buf(),
                row: i + 1,
                column: header[c].into(),
                value: raw.into(),
            })?;
        }
        rows.push(row);
    }
    Ok(rows)
}

pub fn write_visibility_curve(path: impl AsRef<Path>, curve: &[(f64, f64)]) -> Result<()> {
    write_rows(
        path.as_ref(),
        VISIBILITY_CURVE_HEADER,
        curve.iter().map(|(dl, v)| [dl.to_string(), v.to_string()]),
    )
}

pub fn read_visibility_curve(path: impl AsRef<Path>) -> Result<Vec<(f64, f64)>> {
    Ok(read_rows(path.as_ref(), VISIBILITY_CURVE_HEADER)?
        .into_iter()
        .map(|[a, b]| (a, b))
        .collect())
}

pub fn write_fringe_pattern(path: impl AsRef<Path>, pattern: &FringePattern) -> Result<()> {
    write_rows(
        path.as_ref(),
        FRINGE_HEADER,
        pattern
            .x
            .iter()
            .zip(&pattern.intensity)
            .map(|(x, i)| [x.to_string(), i.to_string()]),
    )
}

/// Screen positions and intensities of a fringe CSV.
pub fn read_fringe_pattern(path: impl AsRef<Path>) -> Result<(Vec<f64>, Vec<f64>)> {
    Ok(read_rows(path.as_ref(), FRINGE_HEADER)?
        .into_iter()
        .map(|[x, i]| (x, i))
        .unzip())
}

/// One row of the mode-count statistics table.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StatsRow {
    pub n_modes: usize,
    pub occurrence_probability: f64,
    pub mean_duration_s: f64,
    pub stderr: f64,
}

impl From<&VisibilityStats> for StatsRow {
    fn from(s: &VisibilityStats) -> Self {
        Self {
            n_modes: s.n_modes,
            occurrence_probability: s.occurrence_probability,
            mean_duration_s: s.mean_duration,
            stderr: s.occurrence_stderr,
        }
    }
}

pub fn write_stats(path: impl AsRef<Path>, rows: &[StatsRow]) -> Result<()> {
    write_rows(
        path.as_ref(),
        STATS_HEADER,
        rows.iter().map(|r| {
            [
                r.n_modes.to_string(),
                r.occurrence_probability.to_string(),
                r.mean_duration_s.to_string(),
                r.stderr.to_string(),
            ]
        }),
    )
}

pub fn read_stats(path: impl AsRef<Path>) -> Result<Vec<StatsRow>> {
    let path = path.as_ref();
    read_rows(path, STATS_HEADER)?
        .into_iter()
        .map(|[n, p, d, e]| {
            if n < 1.0 || n.fract() != 0.0 {
                return Err(Error::Malformed {
                    path: path.to_path_buf(),
                    message: format!("mode count {n} is not a positive integer"),
                });
            }
            Ok(StatsRow {
                n_modes: n as usize,
                occurrence_probability: p,
                mean_duration_s: d,
                stderr: e,
            })
        })
        .collect()
}

/// `(t, d1, d2, and, xor)` rows of a logic trace.
pub type TraceRow = (f64, bool, bool, bool, bool);

pub fn write_logic_trace(path: impl AsRef<Path>, trace: &LogicTrace) -> Result<()> {
    let bit = |b: bool| if b { "1".to_string() } else { "0".to_string() };
    write_rows(
        path.as_ref(),
        TRACE_HEADER,
        trace.events.iter().map(|e| {
            [e.time.to_string(), bit(e.d1), bit(e.d2), bit(e.and_out), bit(e.xor_out)]
        }),
    )
}

pub fn read_logic_trace(path: impl AsRef<Path>) -> Result<Vec<TraceRow>> {
    let path = path.as_ref();
    let bit = |v: f64| -> Result<bool> {
        match v {
            0.0 => Ok(false),
            1.0 => Ok(true),
            _ => Err(Error::Malformed {
                path: path.to_path_buf(),
                message: format!("logic level {v} is not 0 or 1"),
            }),
        }
    };
    read_rows(path, TRACE_HEADER)?
        .into_iter()
        .map(|[t, d1, d2, a, x]| Ok((t, bit(d1)?, bit(d2)?, bit(a)?, bit(x)?)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_mismatch_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.csv");
        std::fs::write(&p, "x,y\n1,2\n").unwrap();
        assert!(matches!(read_visibility_curve(&p), Err(Error::Malformed { .. })));
    }

    #[test]
    fn bad_logic_level() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.csv");
        std::fs::write(&p, "t_s,d1,d2,and,xor\n0,2,0,0,0\n").unwrap();
        assert!(read_logic_trace(&p).is_err());
    }

    #[test]
    fn visibility_curve_is_lossless() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("v.csv");
        let curve = vec![(0.0, 1.0), (1.0 / 3.0, 0.123_456_789_012_345_6), (2e-7, 1e-300)];
        write_visibility_curve(&p, &curve).unwrap();
        assert_eq!(read_visibility_curve(&p).unwrap(), curve);
    }
}
