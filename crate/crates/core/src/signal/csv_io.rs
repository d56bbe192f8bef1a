//! CSV exchange format: a `time,v1` or `time,v1,v2` header followed by rows of
//! decimals. Time is in seconds, strictly increasing and uniformly spaced.
//! Lines starting with `#` are comments and are skipped on read.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use super::VoltageSeries;
use crate::error::{Error, Result};

/// Relative tolerance on the uniformity of the time column.
const TIME_TOLERANCE: f64 = 1e-9;

/// One or two series read from, or destined for, a CSV file.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesSet {
    pub v1: VoltageSeries,
    pub v2: Option<VoltageSeries>,
}

impl SeriesSet {
    pub fn single(v1: VoltageSeries) -> Self {
        Self { v1, v2: None }
    }

    pub fn pair(v1: VoltageSeries, v2: VoltageSeries) -> Result<Self> {
        Error::ensure_same_len(v1.len(), v2.len())?;
        Ok(Self { v1, v2: Some(v2) })
    }

    pub fn len(&self) -> usize {
        self.v1.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Formats a value with 17 significant digits, enough to round-trip an f64.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv(set: &SeriesSet, path: impl AsRef<Path>) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write_csv_to(set, &mut out)?;
    out.flush()?;
    Ok(())
}

pub fn write_csv_to(set: &SeriesSet, out: &mut impl Write) -> Result<()> {
    let rate = set.v1.sample_rate();
    match &set.v2 {
        None => writeln!(out, "time,v1")?,
        Some(_) => writeln!(out, "time,v1,v2")?,
    }
    for (i, &a) in set.v1.samples().iter().enumerate() {
        let t = i as f64 / rate;
        match &set.v2 {
            None => writeln!(out, "{},{}", fmt_f64(t), fmt_f64(a))?,
            Some(v2) => writeln!(
                out,
                "{},{},{}",
                fmt_f64(t),
                fmt_f64(a),
                fmt_f64(v2.samples()[i])
            )?,
        }
    }
    Ok(())
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<SeriesSet> {
    read_csv_from(File::open(path)?)
}

fn csv_error(err: csv::Error) -> Error {
    let line = err.position().map(|p| p.line()).unwrap_or(0);
    match err.into_kind() {
        csv::ErrorKind::Io(e) => Error::Io(e),
        csv::ErrorKind::UnequalLengths {
            expected_len, len, ..
        } => Error::Parse {
            line,
            message: format!("expected {expected_len} columns, found {len}"),
        },
        other => Error::Parse {
            line,
            message: format!("{other:?}"),
        },
    }
}

pub fn read_csv_from(input: impl Read) -> Result<SeriesSet> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::None)
        .from_reader(input);

    let header_line = rdr.position().line();
    let headers = rdr.headers().map_err(csv_error)?.clone();
    let columns: Vec<&str> = headers.iter().collect();
    let width = match columns.as_slice() {
        ["time", "v1"] => 2,
        ["time", "v1", "v2"] => 3,
        _ => {
            return Err(Error::Parse {
                line: header_line.max(1),
                message: format!(
                    "header must be `time,v1` or `time,v1,v2`, found `{}`",
                    columns.join(",")
                ),
            })
        }
    };

    let mut times = Vec::new();
    let mut lines = Vec::new();
    let mut cols: Vec<Vec<f64>> = vec![Vec::new(); width - 1];
    for record in rdr.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let mut values = [0.0; 3];
        for (j, cell) in record.iter().enumerate() {
            values[j] = cell
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| Error::Parse {
                    line,
                    message: format!("cell `{cell}` in column {} is not a finite number", j + 1),
                })?;
        }
        times.push(values[0]);
        lines.push(line);
        for (j, col) in cols.iter_mut().enumerate() {
            col.push(values[j + 1]);
        }
    }

    if times.is_empty() {
        return Err(Error::Parse {
            line: header_line.max(1),
            message: "no data rows".into(),
        });
    }

    let sample_rate = infer_sample_rate(&times, &lines)?;
    let mut cols = cols.into_iter();
    let v1 = VoltageSeries::new(cols.next().unwrap_or_default(), sample_rate)?;
    let v2 = cols
        .next()
        .map(|c| VoltageSeries::new(c, sample_rate))
        .transpose()?;
    Ok(SeriesSet { v1, v2 })
}

/// A single row carries no spacing information; it is assigned 1 Hz.
fn infer_sample_rate(times: &[f64], lines: &[u64]) -> Result<f64> {
    let n = times.len();
    if n == 1 {
        return Ok(1.0);
    }
    for i in 1..n {
        if times[i] <= times[i - 1] {
            return Err(Error::Parse {
                line: lines[i],
                message: format!("time {} does not increase", times[i]),
            });
        }
    }
    let dt = (times[n - 1] - times[0]) / (n - 1) as f64;
    for i in 1..n {
        let expected = times[0] + i as f64 * dt;
        let scale = times[i].abs().max(dt);
        if (times[i] - expected).abs() > TIME_TOLERANCE * scale {
            return Err(Error::Parse {
                line: lines[i],
                message: format!("time {} breaks uniform spacing of {dt} s", times[i]),
            });
        }
    }
    Ok(1.0 / dt)
}
