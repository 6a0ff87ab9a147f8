//! Physics-based generators used as the verification oracle: ground-truth
//! ENF traces, flickering illumination, DVS event streams with labelled
//! contamination, and rolling/global shutter video frames.

mod enf;
mod events;
mod frames;
mod illumination;

pub use enf::{synthesize_enf, EnfProcessConfig};
pub use events::{simulate_events, simulate_events_labeled, ContaminationConfig, EventSource, SensorConfig};
pub use frames::{simulate_frames, FrameParams, FrameSequence, SceneMotion, Shutter, Texture};
pub use illumination::{
    illumination_at, log_expansion_coeffs, mains_signal, Illumination, IlluminationModel, LogExpansion, PhaseIntegrator,
};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent, reproducible RNG streams derived from one user seed.
pub(crate) fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
