//! Plain-text interchange: event and trace CSVs, reference mains recordings,
//! and PGM frame directories.

mod events;
mod frames;
mod reference;
mod traces;

pub use events::{read_events_csv, write_events_csv};
pub use frames::{read_frames, write_frames};
pub use reference::{read_reference_csv, reference_enf, write_reference_csv, ReferenceSignal};
pub use traces::{read_polarity_csv, read_trace_csv, write_polarity_csv, write_trace_csv};

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub(crate) fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

pub(crate) fn finish(path: &Path, mut w: BufWriter<File>) -> Result<()> {
    w.flush().map_err(|e| Error::io(path, e))
}

/// Numbered lines (1-based) of a text file.
pub(crate) fn lines(path: &Path) -> Result<Vec<(usize, String)>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    BufReader::new(file)
        .lines()
        .enumerate()
        .map(|(i, l)| l.map(|l| (i + 1, l)).map_err(|e| Error::io(path, e)))
        .collect()
}

/// `key=value` pairs from a comment such as `# width=4,height=3`.
pub(crate) fn comment_pairs(line: &str) -> Vec<(String, String)> {
    line.trim_start_matches('#')
        .split([',', ' '])
        .filter_map(|kv| kv.split_once('='))
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .collect()
}

pub(crate) fn parse_field<T: std::str::FromStr>(line: usize, field: &str, name: &str) -> Result<T> {
    field.trim().parse().map_err(|_| Error::Parse {
        line,
        message: format!("unparsable {name}"),
    })
}
