use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::window::WindowShape;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StftConfig {
    pub window_s: f64,
    pub hop_s: f64,
    pub window_shape: WindowShape,
    pub zero_pad_factor: usize,
    /// Peak search halfwidth around the nominal mains frequency, in
    /// baseband Hz. Harmonic `m` searches `2m` times this wide.
    pub search_halfwidth_hz: f64,
}

impl Default for StftConfig {
    fn default() -> Self {
        StftConfig {
            window_s: 16.0,
            hop_s: 1.0,
            window_shape: WindowShape::Hann,
            zero_pad_factor: 4,
            search_halfwidth_hz: 0.5,
        }
    }
}

impl StftConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.window_s > 0.0 && self.hop_s > 0.0) {
            return Err(Error::config("STFT window and hop must be positive"));
        }
        if self.hop_s > self.window_s {
            return Err(Error::config("STFT hop must not exceed the window"));
        }
        if self.zero_pad_factor < 1 {
            return Err(Error::config("zero_pad_factor must be at least 1"));
        }
        if !(self.search_halfwidth_hz > 0.0) {
            return Err(Error::config("search halfwidth must be positive"));
        }
        Ok(())
    }
}

/// Per-hop spectral peak frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct PeakTrack {
    /// Centre of the first window, seconds after the first input sample.
    pub t0: f64,
    pub step: f64,
    pub freqs: Vec<f64>,
    /// Height of the chosen peak over the strongest competing local maximum
    /// in the search band, dB.
    pub prominence_db: Vec<f64>,
}

/// Tracks the strongest spectral line within `center_hz ± halfwidth_hz`,
/// one estimate per hop, refined by a parabola through the log magnitudes
/// of the three bins around the maximum.
pub fn stft_peak_track(
    signal: &[f64],
    fs: f64,
    cfg: &StftConfig,
    center_hz: f64,
    halfwidth_hz: f64,
) -> Result<PeakTrack> {
    cfg.validate()?;
    let win = (cfg.window_s * fs).round() as usize;
    let hop = ((cfg.hop_s * fs).round() as usize).max(1);
    if win < 2 || signal.len() < win {
        return Err(Error::TooShort {
            duration: signal.len() as f64 / fs,
            needed: cfg.window_s,
        });
    }
    let nfft = win * cfg.zero_pad_factor;
    let df = fs / nfft as f64;
    let (lo, hi) = (center_hz - halfwidth_hz, center_hz + halfwidth_hz);
    let k_lo = ((lo / df).ceil().max(1.0)) as usize;
    let k_hi = ((hi / df).floor() as usize).min(nfft / 2 - 1);
    if k_hi < k_lo {
        return Err(Error::config("search band narrower than one FFT bin"));
    }

    let taper = cfg.window_shape.coefficients(win);
    let fft = FftPlanner::<f64>::new().plan_fft_forward(nfft);
    let mut buf = vec![Complex::new(0.0, 0.0); nfft];
    let mut scratch = vec![Complex::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    let hops = (signal.len() - win) / hop + 1;
    let mut freqs = Vec::with_capacity(hops);
    let mut prominence_db = Vec::with_capacity(hops);
    // Bins k_lo-1 ..= k_hi+1 so the parabola has neighbours at the band edges.
    let mut level = vec![0.0; k_hi - k_lo + 3];

    for s in 0..hops {
        let frame = &signal[s * hop..s * hop + win];
        for (b, (x, w)) in buf.iter_mut().zip(frame.iter().zip(&taper)) {
            *b = Complex::new(x * w, 0.0);
        }
        buf[win..].fill(Complex::new(0.0, 0.0));
        fft.process_with_scratch(&mut buf, &mut scratch);
        for (i, l) in level.iter_mut().enumerate() {
            *l = 10.0 * (buf[k_lo - 1 + i].norm_sqr() + f64::MIN_POSITIVE).log10();
        }

        let band = &level[1..level.len() - 1];
        let peak = band
            .iter()
            .enumerate()
            .fold(0, |best, (i, &v)| if v > band[best] { i } else { best });
        let (a, b, c) = (level[peak], level[peak + 1], level[peak + 2]);
        let denom = a - 2.0 * b + c;
        let delta = if denom < 0.0 {
            (0.5 * (a - c) / denom).clamp(-0.5, 0.5)
        } else {
            0.0
        };
        freqs.push((((k_lo + peak) as f64 + delta) * df).clamp(lo, hi));

        let rival = (0..band.len())
            .filter(|&i| i != peak)
            .filter(|&i| level[i] < level[i + 1] && level[i + 1] >= level[i + 2])
            .map(|i| band[i])
            .fold(f64::NEG_INFINITY, f64::max);
        let floor = if rival.is_finite() {
            rival
        } else {
            band.iter().copied().fold(f64::INFINITY, f64::min)
        };
        prominence_db.push(band[peak] - floor);
    }

    Ok(PeakTrack {
        t0: win as f64 / (2.0 * fs),
        step: hop as f64 / fs,
        freqs,
        prominence_db,
    })
}
