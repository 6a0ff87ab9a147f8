//! Event-based ENF extraction: uniform temporal sampling, majority-vote
//! spatial sampling, per-harmonic band-pass and STFT peak tracking, and
//! smoothness-driven harmonic selection.

mod bandpass;
mod harmonics;
mod pipeline;
mod sampling;
mod stft;
mod window;

pub use bandpass::{bandpass, bandpass_signal, design_bandpass, frequency_response};
pub use harmonics::{
    harmonic_select, normalize_to_baseband, smoothness, HarmonicConfig, HarmonicTraces, HarmonicTrack, SegmentChoice,
    Selection,
};
pub use pipeline::{extract_eenf, extract_eenf_detailed, EenfResult};
pub use sampling::{spatial_vote, temporal_sample, SamplingConfig, TemporalSlices};
pub use stft::{stft_peak_track, PeakTrack, StftConfig};
pub use window::WindowShape;
