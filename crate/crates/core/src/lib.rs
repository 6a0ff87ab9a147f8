//! Electric network frequency (ENF) extraction from event-camera streams.
//!
//! Mains lighting flickers at twice the grid frequency. An event camera
//! turns that flicker into a dense stream of polarity events, from which
//! [`eenf::extract_eenf`] recovers the grid frequency over time. The crate
//! also provides a sensor and video simulator ([`simulate`]), a frame-based
//! baseline ([`venf`]), CSV and PGM interchange ([`ingest`]) and a
//! closed-loop scoring harness ([`evaluate`]).
//!
//! ```
//! use eventenf::eenf::{extract_eenf, HarmonicConfig, SamplingConfig, StftConfig};
//! use eventenf::simulate::{
//!     simulate_events, synthesize_enf, ContaminationConfig, EnfProcessConfig, IlluminationModel, SensorConfig,
//! };
//! use eventenf::trace::GridConfig;
//!
//! let enf = synthesize_enf(&EnfProcessConfig::default(), 20.0, 0.01)?;
//! let stream = simulate_events(
//!     &SensorConfig::default(),
//!     &IlluminationModel::default(),
//!     &enf,
//!     &ContaminationConfig::default(),
//!     0,
//! )?;
//! let trace = extract_eenf(
//!     &stream,
//!     &SamplingConfig::default(),
//!     &StftConfig::default(),
//!     &HarmonicConfig::default(),
//!     GridConfig::HZ50,
//! )?;
//! assert!(!trace.is_empty());
//! # Ok::<(), eventenf::Error>(())
//! ```

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod eenf;
pub mod error;
pub mod evaluate;
pub mod event;
pub mod ingest;
pub mod metrics;
pub mod plot;
pub mod simulate;
pub mod trace;
pub mod venf;

pub use error::{Error, Result};
pub use event::{Event, EventStream, Polarity};
pub use trace::{EnfTrace, GridConfig, PolaritySequence};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/simulation.md")]
    mod simulation {}
    #[doc = include_str!("../../../book/src/sampling.md")]
    mod sampling {}
    #[doc = include_str!("../../../book/src/harmonics.md")]
    mod harmonics {}
    #[doc = include_str!("../../../book/src/video.md")]
    mod video {}
    #[doc = include_str!("../../../book/src/evaluation.md")]
    mod evaluation {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
