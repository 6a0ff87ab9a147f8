use std::io::Write;
use std::path::Path;

use super::{comment_pairs, create, finish, lines, parse_field};
use crate::eenf::{stft_peak_track, StftConfig};
use crate::error::{Error, Result};
use crate::trace::{EnfTrace, GridConfig};

/// A mains-proportional voltage recording starting at t = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceSignal {
    sample_rate: f64,
    samples: Vec<f64>,
}

impl ReferenceSignal {
    pub fn new(sample_rate: f64, samples: Vec<f64>) -> Result<Self> {
        if !(sample_rate > 0.0) || !sample_rate.is_finite() {
            return Err(Error::config("reference sample rate must be positive"));
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::config(format!("reference sample {i} is not finite")));
        }
        Ok(ReferenceSignal { sample_rate, samples })
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate
    }
}

/// Ground-truth trace: tracks the mains line within the search halfwidth of
/// nominal, one estimate per hop at the window centre.
pub fn reference_enf(sig: &ReferenceSignal, stft: &StftConfig, grid: GridConfig) -> Result<EnfTrace> {
    let nominal = grid.nominal_hz();
    if sig.sample_rate < 8.0 * nominal {
        return Err(Error::config(format!(
            "reference sample rate {} Hz is below 8x nominal",
            sig.sample_rate
        )));
    }
    let peaks = stft_peak_track(&sig.samples, sig.sample_rate, stft, nominal, stft.search_halfwidth_hz)?;
    EnfTrace::new(peaks.t0, peaks.step, peaks.freqs)
}

/// Reads one sample per line, with the rate given by a `# sample_rate=`
/// comment. A non-numeric first data line is taken as a column header.
pub fn read_reference_csv(path: impl AsRef<Path>) -> Result<ReferenceSignal> {
    let path = path.as_ref();
    let mut rate = None;
    let mut samples = Vec::new();
    let mut first = true;
    for (line, text) in lines(path)? {
        let text = text.trim();
        if text.is_empty() {
            continue;
        }
        if text.starts_with('#') {
            if let Some((_, v)) = comment_pairs(text).into_iter().find(|(k, _)| k == "sample_rate") {
                rate = Some(parse_field::<f64>(line, &v, "sample_rate")?);
            }
            continue;
        }
        let parsed = text.parse::<f64>();
        if first && parsed.is_err() {
            first = false;
            continue;
        }
        first = false;
        samples.push(parsed.map_err(|_| Error::Parse {
            line,
            message: "unparsable sample".into(),
        })?);
    }
    let rate = rate.ok_or(Error::Parse {
        line: 1,
        message: "missing '# sample_rate=' comment".into(),
    })?;
    ReferenceSignal::new(rate, samples)
}

pub fn write_reference_csv(sig: &ReferenceSignal, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = create(path)?;
    let io = |e| Error::io(path, e);
    writeln!(w, "# sample_rate={}", sig.sample_rate).map_err(io)?;
    writeln!(w, "v").map_err(io)?;
    for v in &sig.samples {
        writeln!(w, "{v}").map_err(io)?;
    }
    finish(path, w)
}
