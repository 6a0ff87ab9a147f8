use rayon::prelude::*;

use super::bandpass::bandpass_signal;
use super::harmonics::{
    harmonic_select, normalize_to_baseband, HarmonicConfig, HarmonicTraces, HarmonicTrack, Selection,
};
use super::sampling::{spatial_vote, temporal_sample, SamplingConfig};
use super::stft::{stft_peak_track, StftConfig};
use crate::error::{Error, Result};
use crate::event::EventStream;
use crate::trace::{EnfTrace, GridConfig, PolaritySequence};

/// Everything the extractor produced on the way to its estimate.
#[derive(Debug, Clone)]
pub struct EenfResult {
    pub trace: EnfTrace,
    pub selection: Selection,
    pub harmonics: HarmonicTraces,
    pub polarity: PolaritySequence,
}

impl EenfResult {
    pub fn all_low_confidence(&self) -> bool {
        self.selection.all_low_confidence()
    }
}

/// Estimates the mains frequency from an event stream.
pub fn extract_eenf(
    stream: &EventStream,
    sampling: &SamplingConfig,
    stft: &StftConfig,
    harmonics: &HarmonicConfig,
    grid: GridConfig,
) -> Result<EnfTrace> {
    extract_eenf_detailed(stream, sampling, stft, harmonics, grid).map(|r| r.trace)
}

/// As [`extract_eenf`], keeping the polarity sequence, every per-harmonic
/// trace and the per-segment selection record.
pub fn extract_eenf_detailed(
    stream: &EventStream,
    sampling: &SamplingConfig,
    stft: &StftConfig,
    harmonics: &HarmonicConfig,
    grid: GridConfig,
) -> Result<EenfResult> {
    sampling.validate()?;
    stft.validate()?;
    harmonics.validate()?;
    if stream.is_empty() {
        return Err(Error::EmptyStream);
    }
    let duration = stream.duration();
    if duration < stft.window_s {
        return Err(Error::TooShort {
            duration,
            needed: stft.window_s,
        });
    }

    let slices = temporal_sample(stream, sampling)?;
    let polarity = spatial_vote(&slices)?;
    let fs = polarity.sample_rate();
    let flicker = grid.flicker_hz();

    let orders: Vec<usize> = (1..=harmonics.max_order_m)
        .filter(|&m| {
            let top = m as f64 * (flicker + harmonics.band_halfwidth_hz);
            let ok = top < fs / 2.0;
            if !ok {
                log::warn!(
                    "skipping harmonic {m}: {top} Hz is beyond the {} Hz Nyquist limit",
                    fs / 2.0
                );
            }
            ok
        })
        .collect();
    if orders.is_empty() {
        return Err(Error::BandExceedsNyquist {
            lo: flicker - harmonics.band_halfwidth_hz,
            hi: flicker + harmonics.band_halfwidth_hz,
            nyquist: fs / 2.0,
        });
    }

    let signal = polarity.to_f64();
    let tracks = orders
        .par_iter()
        .map(|&m| {
            let mf = m as f64;
            let filtered = bandpass_signal(&signal, fs, mf * flicker, mf * harmonics.band_halfwidth_hz)?;
            let peaks = stft_peak_track(&filtered, fs, stft, mf * flicker, 2.0 * mf * stft.search_halfwidth_hz)?;
            let raw = EnfTrace::new(polarity.t0() + peaks.t0, peaks.step, peaks.freqs)?;
            log::debug!("harmonic {m}: {} estimates", raw.len());
            Ok(HarmonicTrack::new(m, normalize_to_baseband(&raw, m)?).with_prominence(peaks.prominence_db))
        })
        .collect::<Result<Vec<_>>>()?;
    let harmonics_traces = HarmonicTraces::new(tracks)?;
    let selection = harmonic_select(&harmonics_traces, harmonics)?;
    if selection.all_low_confidence() {
        log::warn!("every segment is low confidence; the estimate is probably noise");
    }

    Ok(EenfResult {
        trace: selection.trace.clone(),
        selection,
        harmonics: harmonics_traces,
        polarity,
    })
}
