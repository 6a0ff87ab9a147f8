//! Uniformly sampled time series shared by every stage: frequency traces and
//! polarity sequences, plus the grid they are measured against.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance used when deciding whether a time falls on a grid point.
const GRID_EPS: f64 = 1e-9;

/// Nominal mains frequency of the power grid being observed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct GridConfig {
    nominal_hz: u32,
}

impl GridConfig {
    pub const HZ50: GridConfig = GridConfig { nominal_hz: 50 };
    pub const HZ60: GridConfig = GridConfig { nominal_hz: 60 };

    pub fn new(nominal_hz: u32) -> Result<Self> {
        match nominal_hz {
            50 | 60 => Ok(GridConfig { nominal_hz }),
            other => Err(Error::config(format!(
                "nominal grid frequency must be 50 or 60 Hz, got {other}"
            ))),
        }
    }

    pub fn nominal_hz(&self) -> f64 {
        f64::from(self.nominal_hz)
    }

    /// Lamps driven by the grid flicker at twice the mains frequency.
    pub fn flicker_hz(&self) -> f64 {
        2.0 * self.nominal_hz()
    }
}

impl Default for GridConfig {
    fn default() -> Self {
        Self::HZ50
    }
}

impl TryFrom<u32> for GridConfig {
    type Error = Error;

    fn try_from(value: u32) -> Result<Self> {
        GridConfig::new(value)
    }
}

impl From<GridConfig> for u32 {
    fn from(g: GridConfig) -> u32 {
        g.nominal_hz
    }
}

/// A uniformly sampled frequency trace in Hz.
#[derive(Debug, Clone, PartialEq)]
pub struct EnfTrace {
    t0: f64,
    step: f64,
    values: Vec<f64>,
}

impl EnfTrace {
    pub fn new(t0: f64, step: f64, values: Vec<f64>) -> Result<Self> {
        if !(step > 0.0) || !step.is_finite() {
            return Err(Error::config(format!("trace step must be positive, got {step}")));
        }
        if !t0.is_finite() {
            return Err(Error::config("trace start time must be finite"));
        }
        if values.is_empty() {
            return Err(Error::TooFewSamples { needed: 1, got: 0 });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::config(format!("trace value {i} is not finite")));
        }
        Ok(EnfTrace { t0, step, values })
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Time of the last sample.
    pub fn end(&self) -> f64 {
        self.time_of(self.values.len() - 1)
    }

    pub fn time_of(&self, index: usize) -> f64 {
        self.t0 + index as f64 * self.step
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.values.len()).map(move |i| self.time_of(i))
    }

    /// Linear interpolation of the trace at `t`.
    pub fn value_at(&self, t: f64) -> Result<f64> {
        let pos = (t - self.t0) / self.step;
        let last = (self.values.len() - 1) as f64;
        if pos < -GRID_EPS || pos > last + GRID_EPS {
            return Err(Error::OutsideSupport {
                t,
                start: self.t0,
                end: self.end(),
            });
        }
        let nearest = pos.round();
        if (pos - nearest).abs() < GRID_EPS {
            return Ok(self.values[nearest as usize]);
        }
        let i = pos.floor() as usize;
        let frac = pos - i as f64;
        Ok(self.values[i] * (1.0 - frac) + self.values[i + 1] * frac)
    }

    /// Resamples onto `len` points starting at `t0` with spacing `step`.
    pub fn resample(&self, t0: f64, step: f64, len: usize) -> Result<EnfTrace> {
        let values = (0..len)
            .map(|i| self.value_at(t0 + i as f64 * step))
            .collect::<Result<Vec<_>>>()?;
        EnfTrace::new(t0, step, values)
    }

    /// Returns the sub-trace `[start, start + len)`.
    pub fn slice(&self, start: usize, len: usize) -> Result<EnfTrace> {
        let end = (start + len).min(self.values.len());
        EnfTrace::new(self.time_of(start), self.step, self.values[start..end].to_vec())
    }
}

/// Puts two traces on a shared grid: the coarser step over their common
/// support, both resampled by linear interpolation.
pub fn align_traces(a: &EnfTrace, b: &EnfTrace) -> Result<(EnfTrace, EnfTrace)> {
    let step = a.step.max(b.step);
    let start = a.t0.max(b.t0);
    let end = a.end().min(b.end());
    if end < start - GRID_EPS * step {
        return Err(Error::DisjointTraces);
    }
    let len = ((end - start) / step + GRID_EPS).floor().max(0.0) as usize + 1;
    Ok((a.resample(start, step, len)?, b.resample(start, step, len)?))
}

/// The majority-vote polarity sequence, one sample per sampling interval.
#[derive(Debug, Clone, PartialEq)]
pub struct PolaritySequence {
    t0: f64,
    step: f64,
    values: Vec<i8>,
}

impl PolaritySequence {
    pub fn new(t0: f64, step: f64, values: Vec<i8>) -> Result<Self> {
        if !(step > 0.0) || !step.is_finite() {
            return Err(Error::config(format!("sampling step must be positive, got {step}")));
        }
        if let Some(i) = values.iter().position(|v| !(-1..=1).contains(v)) {
            return Err(Error::config(format!(
                "polarity sample {i} is {} (expected -1, 0 or 1)",
                values[i]
            )));
        }
        Ok(PolaritySequence { t0, step, values })
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn sample_rate(&self) -> f64 {
        1.0 / self.step
    }

    pub fn values(&self) -> &[i8] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.values.iter().map(|&v| f64::from(v)).collect()
    }
}
