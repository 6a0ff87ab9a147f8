//! Layered configuration: built-in defaults, then an optional TOML file with
//! one section per module, then command-line flags.

use std::path::Path;

use anyhow::Context;
use eventenf::eenf::{HarmonicConfig, SamplingConfig, StftConfig};
use eventenf::evaluate::ScenarioParams;
use eventenf::simulate::{ContaminationConfig, EnfProcessConfig, FrameParams, IlluminationModel, SensorConfig};
use eventenf::venf::VenfConfig;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub enf: EnfProcessConfig,
    pub illumination: IlluminationModel,
    pub sensor: SensorConfig,
    pub contamination: ContaminationConfig,
    pub frames: FrameParams,
    pub sampling: SamplingConfig,
    pub stft: StftConfig,
    pub harmonics: HarmonicConfig,
    pub venf: VenfConfig,
    pub evaluate: ScenarioParams,
}

impl Config {
    pub fn load(path: Option<&Path>) -> anyhow::Result<Config> {
        let Some(path) = path else {
            return Ok(Config::default());
        };
        let text = std::fs::read_to_string(path).map_err(|e| eventenf::Error::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        toml::from_str(&text).with_context(|| format!("invalid config file {}", path.display()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config values are always representable in TOML")
    }
}
