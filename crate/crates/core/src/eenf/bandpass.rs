//! Linear-phase FIR band-pass, applied with its delay removed so the output
//! lines up sample-for-sample with the input.

use std::f64::consts::PI;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::trace::PolaritySequence;

/// Stop-band attenuation the Kaiser design aims for, dB.
const STOPBAND_DB: f64 = 50.0;

fn bessel_i0(x: f64) -> f64 {
    let half = x / 2.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        term *= half / k as f64;
        let t2 = term * term;
        sum += t2;
        if t2 < sum * 1e-17 {
            break;
        }
    }
    sum
}

/// Kaiser-windowed band-pass kernel with cutoffs at `center ± halfwidth`
/// and transition bands one halfwidth wide, so the response is flat within
/// `center ± halfwidth/2` and fully attenuated beyond `center ± 1.5·halfwidth`.
pub fn design_bandpass(center_hz: f64, halfwidth_hz: f64, fs: f64) -> Result<Vec<f64>> {
    let nyquist = fs / 2.0;
    let (lo, hi) = (center_hz - halfwidth_hz, center_hz + halfwidth_hz);
    if !(halfwidth_hz > 0.0) || !(fs > 0.0) {
        return Err(Error::config("band-pass needs positive halfwidth and sample rate"));
    }
    if hi >= nyquist || lo <= 0.0 {
        return Err(Error::BandExceedsNyquist { lo, hi, nyquist });
    }
    let transition = 2.0 * PI * halfwidth_hz / fs;
    let mut taps = ((STOPBAND_DB - 7.95) / (2.285 * transition)).ceil() as usize + 1;
    if taps % 2 == 0 {
        taps += 1;
    }
    let beta = if STOPBAND_DB > 50.0 {
        0.1102 * (STOPBAND_DB - 8.7)
    } else {
        0.5842 * (STOPBAND_DB - 21.0).powf(0.4) + 0.07886 * (STOPBAND_DB - 21.0)
    };
    let mid = (taps / 2) as f64;
    let norm = bessel_i0(beta);
    let bw = 2.0 * halfwidth_hz / fs;
    let fc = center_hz / fs;
    Ok((0..taps)
        .map(|i| {
            let n = i as f64 - mid;
            let lowpass = if n == 0.0 { bw } else { (PI * bw * n).sin() / (PI * n) };
            let r = n / mid;
            let kaiser = bessel_i0(beta * (1.0 - r * r).max(0.0).sqrt()) / norm;
            2.0 * lowpass * (2.0 * PI * fc * n).cos() * kaiser
        })
        .collect())
}

/// Magnitude response of `taps` at `freq_hz`.
pub fn frequency_response(taps: &[f64], freq_hz: f64, fs: f64) -> f64 {
    let w = 2.0 * PI * freq_hz / fs;
    let (re, im) = taps.iter().enumerate().fold((0.0, 0.0), |(re, im), (n, h)| {
        let a = w * n as f64;
        (re + h * a.cos(), im - h * a.sin())
    });
    (re * re + im * im).sqrt()
}

/// Zero-phase band-pass of a real signal sampled at `fs`.
pub fn bandpass_signal(signal: &[f64], fs: f64, center_hz: f64, halfwidth_hz: f64) -> Result<Vec<f64>> {
    let taps = design_bandpass(center_hz, halfwidth_hz, fs)?;
    Ok(convolve_centered(signal, &taps))
}

/// Zero-phase band-pass of a polarity sequence.
pub fn bandpass(seq: &PolaritySequence, center_hz: f64, halfwidth_hz: f64) -> Result<Vec<f64>> {
    bandpass_signal(&seq.to_f64(), seq.sample_rate(), center_hz, halfwidth_hz)
}

/// `signal * taps` via FFT, trimmed so output sample n aligns with input n.
fn convolve_centered(signal: &[f64], taps: &[f64]) -> Vec<f64> {
    if signal.is_empty() {
        return Vec::new();
    }
    let delay = taps.len() / 2;
    let full = signal.len() + taps.len() - 1;
    let n = full.next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let mut a: Vec<Complex<f64>> = signal.iter().map(|&v| Complex::new(v, 0.0)).collect();
    a.resize(n, Complex::new(0.0, 0.0));
    let mut b: Vec<Complex<f64>> = taps.iter().map(|&v| Complex::new(v, 0.0)).collect();
    b.resize(n, Complex::new(0.0, 0.0));
    fwd.process(&mut a);
    fwd.process(&mut b);
    for (x, y) in a.iter_mut().zip(&b) {
        *x *= y;
    }
    inv.process(&mut a);
    let scale = 1.0 / n as f64;
    a[delay..delay + signal.len()].iter().map(|c| c.re * scale).collect()
}
