use rand::Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::illumination::{Illumination, IlluminationModel};
use crate::error::{Error, Result};
use crate::event::{Event, EventStream, Polarity};
use crate::trace::EnfTrace;

/// Pixel array and comparator parameters of the simulated event camera.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SensorConfig {
    pub width: u16,
    pub height: u16,
    /// Contrast threshold C, in log-intensity units.
    pub threshold_c: f64,
    /// Integration step of the log-intensity walk, seconds.
    pub sim_step: f64,
    /// Minimum gap between two events of one pixel, seconds.
    pub refractory: f64,
    /// Spread of the per-pixel reference level at start-up, as a fraction of
    /// C. Zero gives every pixel the identical crossing schedule.
    pub reference_spread: f64,
    /// Timestamp clock of the sensor, ticks per second.
    pub ticks_per_second: u32,
}

impl Default for SensorConfig {
    fn default() -> Self {
        SensorConfig {
            width: 4,
            height: 4,
            threshold_c: 0.1,
            sim_step: 50e-6,
            refractory: 0.0,
            reference_spread: 1.0,
            ticks_per_second: 1_000_000,
        }
    }
}

impl SensorConfig {
    pub fn pixel_count(&self) -> usize {
        usize::from(self.width) * usize::from(self.height)
    }

    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::config("sensor dimensions must be non-zero"));
        }
        if !(self.threshold_c > 0.0) {
            return Err(Error::config("threshold_c must be positive"));
        }
        if !(self.sim_step > 0.0) {
            return Err(Error::config("sim_step must be positive"));
        }
        if !(self.refractory >= 0.0) {
            return Err(Error::config("refractory must be non-negative"));
        }
        if !(0.0..=1.0).contains(&self.reference_spread) {
            return Err(Error::config("reference_spread must lie in [0, 1]"));
        }
        if self.ticks_per_second == 0 {
            return Err(Error::config("ticks_per_second must be positive"));
        }
        Ok(())
    }

    /// Snaps a time onto the sensor clock. Dividing an integer tick count
    /// keeps the value exactly representable at nine decimals.
    fn quantize(&self, t: f64) -> f64 {
        let tps = f64::from(self.ticks_per_second);
        (t * tps).round() / tps
    }
}

/// Illumination-independent events mixed into the stream.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ContaminationConfig {
    /// Co-located +/- event pairs per second (object motion).
    pub motion_pair_rate: f64,
    /// Random-polarity background events per second per pixel.
    pub noise_rate: f64,
    /// Fraction of motion pairs packed into short bursts.
    pub burst_fraction: f64,
}

impl ContaminationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.motion_pair_rate >= 0.0 && self.noise_rate >= 0.0) {
            return Err(Error::config("contamination rates must be non-negative"));
        }
        if !(0.0..=1.0).contains(&self.burst_fraction) {
            return Err(Error::config("burst_fraction must lie in [0, 1]"));
        }
        Ok(())
    }
}

/// Which physical process produced a simulated event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EventSource {
    Illumination,
    Motion,
    Noise,
}

const MOTION_STREAM: u64 = 1 << 32;
const NOISE_STREAM: u64 = 2 << 32;
const PAIRS_PER_BURST: usize = 100;
const BURST_WIDTH_S: f64 = 0.01;

/// Simulates a static, uniformly lit scene and returns the merged stream.
pub fn simulate_events(
    sensor: &SensorConfig,
    model: &IlluminationModel,
    enf: &EnfTrace,
    contamination: &ContaminationConfig,
    seed: u64,
) -> Result<EventStream> {
    simulate_events_labeled(sensor, model, enf, contamination, seed).map(|(s, _)| s)
}

/// Like [`simulate_events`], also returning the source of every event in
/// stream order.
pub fn simulate_events_labeled(
    sensor: &SensorConfig,
    model: &IlluminationModel,
    enf: &EnfTrace,
    contamination: &ContaminationConfig,
    seed: u64,
) -> Result<(EventStream, Vec<EventSource>)> {
    sensor.validate()?;
    contamination.validate()?;
    if !(model.amplitude > 0.0 && model.bias > model.amplitude) {
        return Err(Error::ExpansionDiverges {
            amplitude: model.amplitude,
            bias: model.bias,
        });
    }
    let max_flicker = 2.0 * enf.values().iter().cloned().fold(f64::MIN, f64::max);
    let max_step = 1.0 / (20.0 * max_flicker);
    if sensor.sim_step > max_step {
        return Err(Error::UndersampledSimulation {
            sim_step: sensor.sim_step,
            max_step,
        });
    }

    let t0 = enf.t0();
    let duration = enf.end() - t0;
    let steps = (duration / sensor.sim_step + 1e-9).floor() as usize;
    let illumination = Illumination::new(*model, enf);
    let log_intensity: Vec<f64> = (0..=steps)
        .map(|k| illumination.intensity(t0 + k as f64 * sensor.sim_step).map(f64::ln))
        .collect::<Result<_>>()?;

    let per_pixel: Vec<Vec<Event>> = (0..sensor.pixel_count())
        .into_par_iter()
        .map(|pixel| pixel_events(sensor, &log_intensity, t0, pixel, seed))
        .collect();

    let mut tagged: Vec<(Event, EventSource)> = per_pixel
        .into_iter()
        .flatten()
        .map(|e| (e, EventSource::Illumination))
        .collect();
    motion_events(sensor, contamination, t0, duration, seed, &mut tagged);
    noise_events(sensor, contamination, t0, duration, seed, &mut tagged);
    tagged.sort_by(|a, b| a.0.t.total_cmp(&b.0.t));

    let (events, labels): (Vec<_>, Vec<_>) = tagged.into_iter().unzip();
    Ok((EventStream::new(sensor.width, sensor.height, events)?, labels))
}

/// Walks one pixel's log intensity against a ladder of spacing C.
fn pixel_events(sensor: &SensorConfig, log_intensity: &[f64], t0: f64, pixel: usize, seed: u64) -> Vec<Event> {
    let c = sensor.threshold_c;
    let h = sensor.sim_step;
    let x = (pixel % usize::from(sensor.width)) as u16;
    let y = (pixel / usize::from(sensor.width)) as u16;
    let mut rng = super::rng_for(seed, pixel as u64);
    let offset = (rng.random::<f64>() - 0.5) * sensor.reference_spread * c;

    let mut reference = log_intensity[0] + offset;
    let mut last_fired = f64::NEG_INFINITY;
    let mut out = Vec::new();
    let mut emit = |t: f64, polarity: Polarity, out: &mut Vec<Event>| {
        let t = sensor.quantize(t);
        if t - last_fired >= sensor.refractory || sensor.refractory == 0.0 {
            out.push(Event::new(t, x, y, polarity));
            last_fired = t;
        }
    };
    for k in 1..log_intensity.len() {
        let (prev, cur) = (log_intensity[k - 1], log_intensity[k]);
        let t_prev = t0 + (k - 1) as f64 * h;
        while cur >= reference + c {
            reference += c;
            let t = t_prev + (reference - prev) / (cur - prev) * h;
            emit(t, Polarity::On, &mut out);
        }
        while cur <= reference - c {
            reference -= c;
            let t = t_prev + (reference - prev) / (cur - prev) * h;
            emit(t, Polarity::Off, &mut out);
        }
    }
    out
}

fn poisson_count<R: Rng>(mean: f64, rng: &mut R) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).map(|p| p.sample(rng) as usize).unwrap_or(0)
}

fn random_pixel<R: Rng>(sensor: &SensorConfig, rng: &mut R) -> (u16, u16) {
    (rng.random_range(0..sensor.width), rng.random_range(0..sensor.height))
}

fn motion_events(
    sensor: &SensorConfig,
    cfg: &ContaminationConfig,
    t0: f64,
    duration: f64,
    seed: u64,
    out: &mut Vec<(Event, EventSource)>,
) {
    let mut rng = super::rng_for(seed, MOTION_STREAM);
    let pairs = poisson_count(cfg.motion_pair_rate * duration, &mut rng);
    let burst_pairs = (cfg.burst_fraction * pairs as f64).round() as usize;
    let mut push_pair = |t: f64, rng: &mut rand_chacha::ChaCha8Rng| {
        let t = sensor.quantize(t.clamp(t0, t0 + duration));
        let (x, y) = random_pixel(sensor, rng);
        out.push((Event::new(t, x, y, Polarity::On), EventSource::Motion));
        out.push((Event::new(t, x, y, Polarity::Off), EventSource::Motion));
    };
    let mut remaining = burst_pairs;
    while remaining > 0 {
        let n = remaining.min(PAIRS_PER_BURST);
        let start = t0 + rng.random::<f64>() * (duration - BURST_WIDTH_S).max(0.0);
        for _ in 0..n {
            let t = start + rng.random::<f64>() * BURST_WIDTH_S;
            push_pair(t, &mut rng);
        }
        remaining -= n;
    }
    for _ in burst_pairs..pairs {
        let t = t0 + rng.random::<f64>() * duration;
        push_pair(t, &mut rng);
    }
}

fn noise_events(
    sensor: &SensorConfig,
    cfg: &ContaminationConfig,
    t0: f64,
    duration: f64,
    seed: u64,
    out: &mut Vec<(Event, EventSource)>,
) {
    let mut rng = super::rng_for(seed, NOISE_STREAM);
    let count = poisson_count(cfg.noise_rate * sensor.pixel_count() as f64 * duration, &mut rng);
    for _ in 0..count {
        let t = sensor.quantize(t0 + rng.random::<f64>() * duration);
        let (x, y) = random_pixel(sensor, &mut rng);
        let polarity = if rng.random::<bool>() {
            Polarity::On
        } else {
            Polarity::Off
        };
        out.push((Event::new(t, x, y, polarity), EventSource::Noise));
    }
}
