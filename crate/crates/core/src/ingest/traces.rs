use std::io::Write;
use std::path::Path;

use super::{create, finish, lines, parse_field};
use crate::error::{Error, Result};
use crate::trace::{EnfTrace, PolaritySequence};

/// Snap a step recovered from printed timestamps back onto nine decimals.
fn snap(v: f64) -> f64 {
    (v * 1e9).round() / 1e9
}

fn read_columns(path: &Path, header: &str) -> Result<Vec<(usize, f64, String)>> {
    let mut rows = Vec::new();
    for (line, text) in lines(path)? {
        let text = text.trim();
        if text.is_empty() || text.starts_with('#') || text.replace(' ', "") == header {
            continue;
        }
        let (t, v) = text.split_once(',').ok_or_else(|| Error::Parse {
            line,
            message: "expected 2 fields".into(),
        })?;
        rows.push((line, parse_field(line, t, "t_s")?, v.trim().to_string()));
    }
    Ok(rows)
}

/// Recovers `(t0, step)` from uniformly spaced timestamps.
fn grid_of(rows: &[(usize, f64, String)]) -> Result<(f64, f64)> {
    let first = rows.first().ok_or(Error::TooFewSamples { needed: 1, got: 0 })?;
    if rows.len() == 1 {
        return Ok((first.1, 1.0));
    }
    let step = snap((rows[rows.len() - 1].1 - first.1) / (rows.len() - 1) as f64);
    for (i, (line, t, _)) in rows.iter().enumerate() {
        if (t - (first.1 + i as f64 * step)).abs() > 1e-6 * step.max(1e-3) {
            return Err(Error::Parse {
                line: *line,
                message: "timestamps are not uniformly spaced".into(),
            });
        }
    }
    Ok((first.1, step))
}

/// Reads a `t_s,f_hz` trace. Samples must be uniformly spaced.
pub fn read_trace_csv(path: impl AsRef<Path>) -> Result<EnfTrace> {
    let rows = read_columns(path.as_ref(), "t_s,f_hz")?;
    let (t0, step) = grid_of(&rows)?;
    let values = rows
        .iter()
        .map(|(line, _, v)| parse_field(*line, v, "f_hz"))
        .collect::<Result<Vec<f64>>>()?;
    EnfTrace::new(t0, step, values)
}

/// Writes a trace; frequencies use the shortest exact decimal form so a
/// re-read is bit-identical.
pub fn write_trace_csv(trace: &EnfTrace, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = create(path)?;
    let io = |e| Error::io(path, e);
    writeln!(w, "t_s,f_hz").map_err(io)?;
    for (t, f) in trace.times().zip(trace.values()) {
        writeln!(w, "{t:.9},{f}").map_err(io)?;
    }
    finish(path, w)
}

pub fn read_polarity_csv(path: impl AsRef<Path>) -> Result<PolaritySequence> {
    let rows = read_columns(path.as_ref(), "t_s,polarity")?;
    let (t0, step) = grid_of(&rows)?;
    let values = rows
        .iter()
        .map(|(line, _, v)| parse_field(*line, v, "polarity"))
        .collect::<Result<Vec<i8>>>()?;
    PolaritySequence::new(t0, step, values)
}

pub fn write_polarity_csv(seq: &PolaritySequence, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = create(path)?;
    let io = |e| Error::io(path, e);
    writeln!(w, "t_s,polarity").map_err(io)?;
    for (i, p) in seq.values().iter().enumerate() {
        writeln!(w, "{:.9},{p}", seq.t0() + i as f64 * seq.step()).map_err(io)?;
    }
    finish(path, w)
}
