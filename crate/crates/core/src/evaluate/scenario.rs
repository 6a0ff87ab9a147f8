use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::report::{Report, ReportRow};
use crate::eenf::{extract_eenf, HarmonicConfig, SamplingConfig, StftConfig};
use crate::error::{Error, Result};
use crate::ingest::{reference_enf, ReferenceSignal};
use crate::metrics::{mae, pearson_cc};
use crate::simulate::{
    mains_signal, simulate_events, simulate_frames, synthesize_enf, ContaminationConfig, EnfProcessConfig, FrameParams,
    IlluminationModel, SceneMotion, SensorConfig, Shutter, Texture,
};
use crate::trace::{align_traces, EnfTrace};
use crate::venf::{extract_venf, VenfConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    Static,
    Dynamic,
    Extreme,
}

impl Scenario {
    pub const ALL: [Scenario; 3] = [Scenario::Static, Scenario::Dynamic, Scenario::Extreme];
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "static" => Ok(Scenario::Static),
            "dynamic" => Ok(Scenario::Dynamic),
            "extreme" => Ok(Scenario::Extreme),
            other => Err(Error::config(format!("unknown scenario '{other}'"))),
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scenario::Static => "static",
            Scenario::Dynamic => "dynamic",
            Scenario::Extreme => "extreme",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Eenf,
    Venf,
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eenf" => Ok(Method::Eenf),
            "venf" => Ok(Method::Venf),
            other => Err(Error::config(format!("unknown method '{other}'"))),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Eenf => "eenf",
            Method::Venf => "venf",
        })
    }
}

/// The video camera filming the same scene.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VideoParams {
    pub fps: f64,
    pub width: usize,
    pub rows: usize,
    pub shutter: Shutter,
    /// Fraction of the frame period spent reading rows; the rest is idle.
    pub readout_fraction: f64,
    /// Reflectance range of the smoothly shaded scene.
    pub texture_lo: f32,
    pub texture_hi: f32,
    /// Quantisation levels; zero keeps continuous values.
    pub levels: u32,
}

impl Default for VideoParams {
    fn default() -> Self {
        VideoParams {
            fps: 30.0,
            width: 32,
            rows: 120,
            shutter: Shutter::Rolling,
            readout_fraction: 1.0,
            texture_lo: 0.05,
            texture_hi: 0.95,
            levels: 255,
        }
    }
}

/// Contamination of the dynamic scene.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DynamicParams {
    /// Motion events per illumination event.
    pub motion_ratio: f64,
    pub burst_fraction: f64,
    /// Largest per-frame texture shift seen by the video camera, pixels.
    pub scene_step_px: i64,
}

impl Default for DynamicParams {
    fn default() -> Self {
        DynamicParams {
            motion_ratio: 1.0,
            burst_fraction: 0.2,
            scene_step_px: 20,
        }
    }
}

/// Exposure of the extreme-lighting scene; the event camera is unaffected.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExtremeParams {
    /// Multiplier on scene reflectance before the video sensor; values above
    /// one saturate bright regions.
    pub texture_gain: f32,
}

impl Default for ExtremeParams {
    fn default() -> Self {
        ExtremeParams { texture_gain: 2.5 }
    }
}

/// Every calibration knob of the synthetic experiments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioParams {
    pub enf: EnfProcessConfig,
    /// Spacing of the synthesized ground-truth trace, seconds.
    pub enf_step: f64,
    pub illumination: IlluminationModel,
    pub sensor: SensorConfig,
    pub sampling: SamplingConfig,
    pub stft: StftConfig,
    pub harmonics: HarmonicConfig,
    pub venf: VenfConfig,
    pub video: VideoParams,
    pub dynamic: DynamicParams,
    pub extreme: ExtremeParams,
    /// Sample rate of the simulated mains recording, Hz.
    pub reference_rate: f64,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        ScenarioParams {
            enf: EnfProcessConfig::default(),
            enf_step: 0.01,
            illumination: IlluminationModel::default(),
            sensor: SensorConfig::default(),
            sampling: SamplingConfig::default(),
            stft: StftConfig::default(),
            harmonics: HarmonicConfig::default(),
            venf: VenfConfig::default(),
            video: VideoParams::default(),
            dynamic: DynamicParams::default(),
            extreme: ExtremeParams::default(),
            reference_rate: 1000.0,
        }
    }
}

impl ScenarioParams {
    /// Expected illumination event rate of the whole sensor: each flicker
    /// cycle sweeps the log intensity up and down between `log(B ± A)`.
    pub fn illumination_event_rate(&self) -> f64 {
        let m = &self.illumination;
        let swing = ((m.bias + m.amplitude) / (m.bias - m.amplitude)).ln();
        self.sensor.pixel_count() as f64 * self.enf.grid.flicker_hz() * 2.0 * swing / self.sensor.threshold_c
    }
}

/// Scores of one seed.
#[derive(Debug, Clone, PartialEq)]
pub struct SeedOutcome {
    pub seed: u64,
    pub eenf_cc: f64,
    pub eenf_mae: f64,
    pub venf_cc: f64,
    pub venf_mae: f64,
}

/// CC and MAE against the truth. A flat estimate (say, from fully saturated
/// video) carries no correlation and scores a CC of zero.
fn score(estimate: &EnfTrace, truth: &EnfTrace) -> Result<(f64, f64)> {
    let (a, b) = align_traces(estimate, truth)?;
    let cc = match pearson_cc(&a, &b) {
        Err(Error::ZeroVariance) => {
            log::warn!("flat estimate; scoring CC as 0");
            0.0
        }
        other => other?,
    };
    Ok((cc, mae(&a, &b)?))
}

/// Simulates and scores one seed of a scenario.
pub fn run_seed(scenario: Scenario, params: &ScenarioParams, seed: u64, duration: f64) -> Result<SeedOutcome> {
    let enf = synthesize_enf(&EnfProcessConfig { seed, ..params.enf }, duration, params.enf_step)?;
    let grid = params.enf.grid;
    let reference = ReferenceSignal::new(params.reference_rate, mains_signal(&enf, params.reference_rate)?)?;
    let truth = reference_enf(&reference, &params.stft, grid)?;

    let contamination = match scenario {
        Scenario::Dynamic => ContaminationConfig {
            motion_pair_rate: params.dynamic.motion_ratio * params.illumination_event_rate() / 2.0,
            burst_fraction: params.dynamic.burst_fraction,
            ..Default::default()
        },
        _ => ContaminationConfig::default(),
    };
    let stream = simulate_events(&params.sensor, &params.illumination, &enf, &contamination, seed)?;
    let eenf = extract_eenf(&stream, &params.sampling, &params.stft, &params.harmonics, grid)?;
    drop(stream);

    let v = &params.video;
    let mut texture = Texture::smooth(v.width, v.rows, v.texture_lo, v.texture_hi, seed);
    if scenario == Scenario::Extreme {
        texture = texture.scaled(params.extreme.texture_gain);
    }
    let frame_params = FrameParams {
        fps: v.fps,
        shutter: v.shutter,
        row_readout: v.readout_fraction / (v.fps * v.rows as f64),
        frame_count: 0,
        levels: v.levels,
        motion: (scenario == Scenario::Dynamic).then_some(SceneMotion {
            max_step_px: params.dynamic.scene_step_px,
            seed,
        }),
    };
    let frames = simulate_frames(&params.illumination, &enf, &frame_params, &texture)?;
    let venf = extract_venf(
        &frames,
        &VenfConfig {
            grid,
            stft: params.stft,
            ..params.venf
        },
    )?;

    let (eenf_cc, eenf_mae) = score(&eenf, &truth)?;
    let (venf_cc, venf_mae) = score(&venf, &truth)?;
    log::info!(
        "{scenario} seed {seed}: E-ENF cc {eenf_cc:.4} mae {eenf_mae:.2e}, V-ENF cc {venf_cc:.4} mae {venf_mae:.2e}"
    );
    Ok(SeedOutcome {
        seed,
        eenf_cc,
        eenf_mae,
        venf_cc,
        venf_mae,
    })
}

/// Runs every seed of a scenario (in parallel) and collects the report rows.
/// Seeds where the event extractor loses to video on MAE are flagged.
pub fn run_scenario(scenario: Scenario, params: &ScenarioParams, seeds: &[u64], duration: f64) -> Result<Report> {
    let needed = 2.0 * params.stft.window_s;
    if duration < needed {
        return Err(Error::TooShort { duration, needed });
    }
    let outcomes = seeds
        .par_iter()
        .map(|&seed| run_seed(scenario, params, seed, duration))
        .collect::<Result<Vec<_>>>()?;
    let mut report = Report::default();
    for o in outcomes {
        report.rows.push(ReportRow {
            scenario,
            method: Method::Eenf,
            seed: o.seed,
            cc: o.eenf_cc,
            mae: o.eenf_mae,
        });
        report.rows.push(ReportRow {
            scenario,
            method: Method::Venf,
            seed: o.seed,
            cc: o.venf_cc,
            mae: o.venf_mae,
        });
        if o.eenf_mae > o.venf_mae {
            log::warn!("{scenario} seed {}: E-ENF MAE exceeds V-ENF MAE", o.seed);
            report.flags.push(format!(
                "{scenario} seed {}: E-ENF MAE {:.3e} > V-ENF MAE {:.3e}",
                o.seed, o.eenf_mae, o.venf_mae
            ));
        }
    }
    Ok(report)
}
