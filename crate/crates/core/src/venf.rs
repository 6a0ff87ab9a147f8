//! Frame-camera baseline: ENF from the mean brightness of video frames or of
//! rolling-shutter rows.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eenf::{bandpass_signal, stft_peak_track, StftConfig};
use crate::error::{Error, Result};
use crate::simulate::{FrameSequence, Shutter};
use crate::trace::{EnfTrace, GridConfig};

/// Target rate after band-passing a row series; plenty for a 100-120 Hz line.
const DECIMATED_RATE: f64 = 1000.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VenfMode {
    /// One sample per frame.
    GlobalMean,
    /// One sample per sensor row in readout order.
    RowMean,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Detrend {
    None,
    /// Subtract the mean of each frame and its successor, cancelling the
    /// static scene.
    #[serde(alias = "pair")]
    ConsecutivePair,
}

impl FromStr for VenfMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "global_mean" => Ok(VenfMode::GlobalMean),
            "row_mean" => Ok(VenfMode::RowMean),
            other => Err(Error::config(format!("unknown V-ENF mode '{other}'"))),
        }
    }
}

impl fmt::Display for VenfMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VenfMode::GlobalMean => "global_mean",
            VenfMode::RowMean => "row_mean",
        })
    }
}

impl FromStr for Detrend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Detrend::None),
            "pair" | "consecutive_pair" => Ok(Detrend::ConsecutivePair),
            other => Err(Error::config(format!("unknown detrend '{other}'"))),
        }
    }
}

impl fmt::Display for Detrend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Detrend::None => "none",
            Detrend::ConsecutivePair => "pair",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VenfConfig {
    pub mode: VenfMode,
    pub detrend: Detrend,
    pub stft: StftConfig,
    pub grid: GridConfig,
    /// Band-pass halfwidth around the expected flicker line, Hz.
    pub band_halfwidth_hz: f64,
}

impl Default for VenfConfig {
    fn default() -> Self {
        VenfConfig {
            mode: VenfMode::RowMean,
            detrend: Detrend::ConsecutivePair,
            stft: StftConfig::default(),
            grid: GridConfig::default(),
            band_halfwidth_hz: 1.0,
        }
    }
}

/// A brightness series sampled uniformly at `fs`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameSeries {
    pub t0: f64,
    pub fs: f64,
    pub values: Vec<f64>,
}

/// Collapses frames into a one-dimensional brightness series.
///
/// Row series are treated as uniform at `fps · rows` even when the sensor
/// idles between frames. Pair detrending yields one frame fewer than it is
/// given.
pub fn frame_series(frames: &FrameSequence, cfg: &VenfConfig) -> Result<FrameSeries> {
    frames.validate()?;
    if frames.frames.is_empty() {
        return Err(Error::TooFewSamples { needed: 1, got: 0 });
    }
    if cfg.mode == VenfMode::RowMean && frames.shutter != Shutter::Rolling {
        return Err(Error::ModeMismatch("row_mean needs a rolling-shutter sequence".into()));
    }
    let (w, h) = (frames.width, frames.height);
    let per_frame = |k: usize| -> Vec<f64> {
        let cur = frames.frame(k);
        let next = (cfg.detrend == Detrend::ConsecutivePair).then(|| frames.frame(k + 1));
        let pixel = |i: usize| match next {
            Some(n) => 0.5 * (f64::from(cur[i]) - f64::from(n[i])),
            None => f64::from(cur[i]),
        };
        match cfg.mode {
            VenfMode::GlobalMean => vec![(0..w * h).map(pixel).sum::<f64>() / (w * h) as f64],
            VenfMode::RowMean => (0..h)
                .map(|y| (y * w..(y + 1) * w).map(pixel).sum::<f64>() / w as f64)
                .collect(),
        }
    };
    let count = match cfg.detrend {
        Detrend::None => frames.frames.len(),
        Detrend::ConsecutivePair => frames.frames.len() - 1,
    };
    if count == 0 {
        return Err(Error::TooFewSamples {
            needed: 2,
            got: frames.frames.len(),
        });
    }
    let values: Vec<f64> = (0..count).into_par_iter().flat_map_iter(per_frame).collect();
    let fs = match cfg.mode {
        VenfMode::GlobalMean => frames.fps,
        VenfMode::RowMean => frames.fps * h as f64,
    };
    // Differencing with the next frame centres each sample half a frame later.
    let t0 = match cfg.detrend {
        Detrend::None => 0.0,
        Detrend::ConsecutivePair => 0.5 / frames.fps,
    };
    Ok(FrameSeries { t0, fs, values })
}

/// Where the flicker line lands in a frame-rate series, and how to undo it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AliasFold {
    /// Multiple of the frame rate folded away.
    pub k: f64,
    /// +1 when the flicker sits above `k · fps`, -1 when below.
    pub sign: f64,
    /// Observed alias frequency, Hz.
    pub alias_hz: f64,
}

impl AliasFold {
    pub fn new(flicker_hz: f64, fps: f64, halfwidth_hz: f64) -> Result<Self> {
        let k = (flicker_hz / fps).round();
        let signed = flicker_hz - k * fps;
        let alias_hz = signed.abs();
        if alias_hz - halfwidth_hz <= 0.0 || alias_hz + halfwidth_hz >= fps / 2.0 {
            return Err(Error::DegenerateAlias {
                flicker: flicker_hz,
                fps,
                alias: alias_hz,
            });
        }
        Ok(AliasFold {
            k,
            sign: signed.signum(),
            alias_hz,
        })
    }

    pub fn unfold(&self, observed_hz: f64, fps: f64) -> f64 {
        self.k * fps + self.sign * observed_hz
    }
}

/// Estimates the mains frequency from video.
pub fn extract_venf(frames: &FrameSequence, cfg: &VenfConfig) -> Result<EnfTrace> {
    cfg.stft.validate()?;
    if !(cfg.band_halfwidth_hz > 0.0) {
        return Err(Error::config("band_halfwidth_hz must be positive"));
    }
    let series = frame_series(frames, cfg)?;
    let duration = series.values.len() as f64 / series.fs;
    if duration < cfg.stft.window_s {
        return Err(Error::TooShort {
            duration,
            needed: cfg.stft.window_s,
        });
    }
    let flicker = cfg.grid.flicker_hz();
    let search = 2.0 * cfg.stft.search_halfwidth_hz;

    let (signal, fs, center, fold) = match cfg.mode {
        VenfMode::RowMean => {
            let filtered = bandpass_signal(&series.values, series.fs, flicker, cfg.band_halfwidth_hz)?;
            let step = ((series.fs / DECIMATED_RATE).floor() as usize).max(1);
            let decimated: Vec<f64> = filtered.into_iter().step_by(step).collect();
            (decimated, series.fs / step as f64, flicker, None)
        }
        VenfMode::GlobalMean => {
            let fold = AliasFold::new(flicker, series.fs, cfg.band_halfwidth_hz.max(search))?;
            let filtered = bandpass_signal(&series.values, series.fs, fold.alias_hz, cfg.band_halfwidth_hz)?;
            (filtered, series.fs, fold.alias_hz, Some(fold))
        }
    };
    let peaks = stft_peak_track(&signal, fs, &cfg.stft, center, search)?;
    let enf = peaks
        .freqs
        .iter()
        .map(|&f| fold.map_or(f, |fold| fold.unfold(f, series.fs)) / 2.0)
        .collect();
    EnfTrace::new(series.t0 + peaks.t0, peaks.step, enf)
}
