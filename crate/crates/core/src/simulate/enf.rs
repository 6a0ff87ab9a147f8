use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trace::{EnfTrace, GridConfig};

/// Parameters of the synthetic grid-frequency process.
///
/// The deviation from nominal follows a discretised Ornstein-Uhlenbeck
/// recursion, clipped to `±max_deviation`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnfProcessConfig {
    pub grid: GridConfig,
    /// Standard deviation of the increments, in Hz per square-root second.
    pub deviation_std: f64,
    /// Clip bound on |f - nominal|, Hz.
    pub max_deviation: f64,
    /// Pull back toward nominal, 1/s.
    pub mean_reversion: f64,
    pub seed: u64,
}

impl Default for EnfProcessConfig {
    fn default() -> Self {
        EnfProcessConfig {
            grid: GridConfig::HZ50,
            deviation_std: 0.005,
            max_deviation: 0.05,
            mean_reversion: 0.05,
            seed: 0,
        }
    }
}

impl EnfProcessConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.deviation_std >= 0.0) {
            return Err(Error::config("deviation_std must be non-negative"));
        }
        if !(self.max_deviation > 0.0) {
            return Err(Error::config("max_deviation must be positive"));
        }
        if !(self.mean_reversion >= 0.0) {
            return Err(Error::config("mean_reversion must be non-negative"));
        }
        Ok(())
    }
}

/// Samples a ground-truth ENF trace on `[0, duration]` with spacing `step`.
pub fn synthesize_enf(cfg: &EnfProcessConfig, duration: f64, step: f64) -> Result<EnfTrace> {
    cfg.validate()?;
    if !(duration >= 1.0) {
        return Err(Error::config(format!("duration must be at least 1 s, got {duration}")));
    }
    if !(step > 0.0) || step > duration {
        return Err(Error::config(format!("invalid trace step {step}")));
    }
    let n = (duration / step).round() as usize + 1;
    let f0 = cfg.grid.nominal_hz();
    let mut rng = super::rng_for(cfg.seed, 0);
    let decay = cfg.mean_reversion * step;
    let kick = cfg.deviation_std * step.sqrt();
    let mut deviation = 0.0f64;
    let mut values = Vec::with_capacity(n);
    for _ in 0..n {
        values.push(f0 + deviation);
        let z: f64 = StandardNormal.sample(&mut rng);
        deviation = (deviation - decay * deviation + kick * z).clamp(-cfg.max_deviation, cfg.max_deviation);
    }
    EnfTrace::new(0.0, step, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_variance_process_is_constant() {
        let cfg = EnfProcessConfig {
            deviation_std: 0.0,
            ..Default::default()
        };
        let t = synthesize_enf(&cfg, 10.0, 0.1).unwrap();
        assert_eq!(t.len(), 101);
        assert!(t.values().iter().all(|&v| v == 50.0));
    }

    #[test]
    fn deviations_stay_within_clip_bound() {
        let cfg = EnfProcessConfig {
            deviation_std: 0.002,
            max_deviation: 0.05,
            seed: 7,
            ..Default::default()
        };
        let t = synthesize_enf(&cfg, 120.0, 0.01).unwrap();
        assert!(t.values().iter().all(|v| (49.95..=50.05).contains(v)));
        // A heavy-tailed setting actually hits the clip.
        let wild = EnfProcessConfig {
            deviation_std: 1.0,
            ..cfg
        };
        let t = synthesize_enf(&wild, 120.0, 0.01).unwrap();
        assert!(t.values().iter().all(|v| (49.95..=50.05).contains(v)));
        assert!(t.values().iter().any(|&v| v == 50.05 || v == 49.95));
    }

    #[test]
    fn same_seed_same_trace() {
        let cfg = EnfProcessConfig {
            seed: 11,
            ..Default::default()
        };
        let a = synthesize_enf(&cfg, 30.0, 0.01).unwrap();
        let b = synthesize_enf(&cfg, 30.0, 0.01).unwrap();
        assert_eq!(a, b);
        let c = synthesize_enf(&EnfProcessConfig { seed: 12, ..cfg }, 30.0, 0.01).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn short_durations_are_rejected() {
        assert!(synthesize_enf(&EnfProcessConfig::default(), 0.5, 0.01).is_err());
    }
}
