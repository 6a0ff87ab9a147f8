use rand::Rng;
use serde::{Deserialize, Serialize};

use super::illumination::{Illumination, IlluminationModel};
use crate::error::{Error, Result};
use crate::trace::EnfTrace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shutter {
    Global,
    Rolling,
}

impl std::str::FromStr for Shutter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "global" => Ok(Shutter::Global),
            "rolling" => Ok(Shutter::Rolling),
            other => Err(Error::config(format!("unknown shutter '{other}'"))),
        }
    }
}

impl std::fmt::Display for Shutter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Shutter::Global => "global",
            Shutter::Rolling => "rolling",
        })
    }
}

/// Static reflectance map multiplied onto the illumination.
#[derive(Debug, Clone, PartialEq)]
pub struct Texture {
    pub width: usize,
    pub height: usize,
    pub values: Vec<f32>,
}

impl Texture {
    pub fn uniform(width: usize, height: usize, value: f32) -> Self {
        Texture {
            width,
            height,
            values: vec![value; width * height],
        }
    }

    /// Independent uniform reflectances in `[lo, hi)`.
    pub fn random(width: usize, height: usize, lo: f32, hi: f32, seed: u64) -> Self {
        let mut rng = super::rng_for(seed, 7 << 32);
        let values = (0..width * height)
            .map(|_| lo + (hi - lo) * rng.random::<f32>())
            .collect();
        Texture { width, height, values }
    }

    /// Large-scale shading built from a few low spatial frequencies, rescaled
    /// to span `[lo, hi]`. Frequencies are whole cycles per side, so the
    /// pattern wraps seamlessly when shifted.
    pub fn smooth(width: usize, height: usize, lo: f32, hi: f32, seed: u64) -> Self {
        use std::f64::consts::PI;
        let mut rng = super::rng_for(seed, 8 << 32);
        let waves: Vec<(f64, f64, f64, f64)> = (0..8)
            .map(|_| {
                let fx = f64::from(rng.random_range(0..=3u8));
                let fy = f64::from(rng.random_range(1..=6u8));
                let phase = rng.random::<f64>() * 2.0 * PI;
                (fx, fy, phase, 1.0 / (1.0 + fx.hypot(fy)))
            })
            .collect();
        let raw: Vec<f64> = (0..width * height)
            .map(|i| {
                let (x, y) = ((i % width) as f64 / width as f64, (i / width) as f64 / height as f64);
                waves
                    .iter()
                    .map(|&(fx, fy, ph, a)| a * (2.0 * PI * (fx * x + fy * y) + ph).cos())
                    .sum()
            })
            .collect();
        let (min, max) = raw.iter().fold((f64::MAX, f64::MIN), |(a, b), &v| (a.min(v), b.max(v)));
        let span = (max - min).max(f64::MIN_POSITIVE);
        let values = raw.iter().map(|v| lo + (hi - lo) * ((v - min) / span) as f32).collect();
        Texture { width, height, values }
    }

    pub fn scaled(&self, gain: f32) -> Self {
        Texture {
            values: self.values.iter().map(|v| v * gain).collect(),
            ..self.clone()
        }
    }

    fn at_wrapped(&self, x: i64, y: i64) -> f32 {
        let w = self.width as i64;
        let h = self.height as i64;
        self.values[(y.rem_euclid(h) * w + x.rem_euclid(w)) as usize]
    }
}

/// Frame-to-frame scene motion: the texture is shifted by a random walk of
/// at most `max_step_px` pixels per axis per frame, wrapping at the edges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SceneMotion {
    pub max_step_px: i64,
    pub seed: u64,
}

/// Capture settings for [`simulate_frames`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FrameParams {
    pub fps: f64,
    pub shutter: Shutter,
    /// Seconds per row (rolling shutter only).
    pub row_readout: f64,
    /// Number of frames; zero means as many as the trace supports.
    pub frame_count: usize,
    /// Quantisation levels above zero (255 for 8-bit video); zero keeps
    /// continuous values.
    pub levels: u32,
    pub motion: Option<SceneMotion>,
}

impl Default for FrameParams {
    fn default() -> Self {
        FrameParams {
            fps: 30.0,
            shutter: Shutter::Global,
            row_readout: 0.0,
            frame_count: 0,
            levels: 255,
            motion: None,
        }
    }
}

/// Rendered video: row-major intensity grids in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameSequence {
    pub width: usize,
    pub height: usize,
    pub fps: f64,
    pub shutter: Shutter,
    pub row_readout: f64,
    pub frames: Vec<Vec<f32>>,
}

impl FrameSequence {
    pub fn validate(&self) -> Result<()> {
        if !(self.fps > 0.0) {
            return Err(Error::config("fps must be positive"));
        }
        if self.width == 0 || self.height == 0 {
            return Err(Error::config("frame dimensions must be non-zero"));
        }
        if self.shutter == Shutter::Rolling {
            if !(self.row_readout > 0.0) {
                return Err(Error::config("rolling shutter needs a positive row_readout"));
            }
            if self.idle_time() < -1e-12 {
                return Err(Error::config(format!(
                    "rolling readout {} s x {} rows exceeds the frame period {} s",
                    self.row_readout,
                    self.height,
                    1.0 / self.fps
                )));
            }
        }
        if let Some(i) = self.frames.iter().position(|f| f.len() != self.width * self.height) {
            return Err(Error::config(format!("frame {i} has the wrong size")));
        }
        Ok(())
    }

    /// Gap between the last row of one frame and the first of the next.
    pub fn idle_time(&self) -> f64 {
        match self.shutter {
            Shutter::Global => 0.0,
            Shutter::Rolling => 1.0 / self.fps - self.height as f64 * self.row_readout,
        }
    }

    pub fn duration(&self) -> f64 {
        self.frames.len() as f64 / self.fps
    }

    pub fn frame(&self, k: usize) -> &[f32] {
        &self.frames[k]
    }
}

/// Renders the flickering scene as seen by a frame camera.
pub fn simulate_frames(
    model: &IlluminationModel,
    enf: &EnfTrace,
    params: &FrameParams,
    texture: &Texture,
) -> Result<FrameSequence> {
    model.validate()?;
    let (width, height) = (texture.width, texture.height);
    if texture.values.len() != width * height || width == 0 || height == 0 {
        return Err(Error::config("texture size does not match its dimensions"));
    }
    let row_readout = match params.shutter {
        Shutter::Global => 0.0,
        Shutter::Rolling => params.row_readout,
    };
    let mut seq = FrameSequence {
        width,
        height,
        fps: params.fps,
        shutter: params.shutter,
        row_readout,
        frames: Vec::new(),
    };
    seq.validate()?;

    let span = enf.end() - enf.t0();
    let last_row_offset = (height - 1) as f64 * row_readout;
    let supported = ((span - last_row_offset) * params.fps + 1e-9).floor() as usize + 1;
    let count = if params.frame_count == 0 {
        supported
    } else if params.frame_count > supported {
        return Err(Error::TooShort {
            duration: span,
            needed: (params.frame_count - 1) as f64 / params.fps + last_row_offset,
        });
    } else {
        params.frame_count
    };

    let illumination = Illumination::new(*model, enf);
    let norm = 1.0 / model.peak();
    let gamma = model.gamma;
    let levels = (params.levels > 0).then_some(params.levels as f32);
    let mut shifts = (0i64, 0i64);
    let mut rng = params.motion.map(|m| super::rng_for(m.seed, 9 << 32));

    seq.frames.reserve(count);
    for k in 0..count {
        if let (Some(m), Some(rng)) = (params.motion.as_ref(), rng.as_mut()) {
            if m.max_step_px > 0 {
                shifts.0 += rng.random_range(-m.max_step_px..=m.max_step_px);
                shifts.1 += rng.random_range(-m.max_step_px..=m.max_step_px);
            }
        }
        let frame_start = enf.t0() + k as f64 / params.fps;
        let mut frame = Vec::with_capacity(width * height);
        let mut level = illumination.intensity(frame_start)? * norm;
        for y in 0..height {
            if params.shutter == Shutter::Rolling {
                level = illumination.intensity(frame_start + y as f64 * row_readout)? * norm;
            }
            for x in 0..width {
                let reflect = texture.at_wrapped(x as i64 - shifts.0, y as i64 - shifts.1);
                let mut v = ((reflect as f64 * level).powf(gamma)).clamp(0.0, 1.0) as f32;
                if let Some(l) = levels {
                    v = (v * l).round() / l;
                }
                frame.push(v);
            }
        }
        seq.frames.push(frame);
    }
    Ok(seq)
}
