use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trace::EnfTrace;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HarmonicConfig {
    /// Highest flicker harmonic analysed.
    pub max_order_m: usize,
    /// Selection segment length, seconds.
    pub segment_s: f64,
    /// Band-pass halfwidth per harmonic order, Hz (harmonic `m` gets `m` times this).
    pub band_halfwidth_hz: f64,
    /// A harmonic must keep its peak this far above the strongest competing
    /// spectral line at every hop of a segment to be trusted there. Winning
    /// segments that miss it are flagged as low confidence.
    pub min_prominence_db: f64,
}

impl Default for HarmonicConfig {
    fn default() -> Self {
        HarmonicConfig {
            max_order_m: 3,
            segment_s: 10.0,
            band_halfwidth_hz: 1.0,
            min_prominence_db: 3.0,
        }
    }
}

impl HarmonicConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_order_m < 1 {
            return Err(Error::config("max_order_m must be at least 1"));
        }
        if !(self.segment_s > 0.0) {
            return Err(Error::config("segment_s must be positive"));
        }
        if !(self.band_halfwidth_hz > 0.0) {
            return Err(Error::config("band_halfwidth_hz must be positive"));
        }
        Ok(())
    }
}

/// Baseband estimate from one harmonic, with optional per-sample peak prominence.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicTrack {
    pub order: usize,
    pub trace: EnfTrace,
    pub prominence_db: Vec<f64>,
}

impl HarmonicTrack {
    pub fn new(order: usize, trace: EnfTrace) -> Self {
        HarmonicTrack {
            order,
            trace,
            prominence_db: Vec::new(),
        }
    }

    pub fn with_prominence(mut self, prominence_db: Vec<f64>) -> Self {
        self.prominence_db = prominence_db;
        self
    }
}

/// Per-harmonic tracks sharing one time grid, keyed by order.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicTraces {
    tracks: BTreeMap<usize, HarmonicTrack>,
}

impl HarmonicTraces {
    pub fn new(tracks: impl IntoIterator<Item = HarmonicTrack>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for t in tracks {
            if t.order < 1 {
                return Err(Error::config("harmonic order must be at least 1"));
            }
            if !t.prominence_db.is_empty() && t.prominence_db.len() != t.trace.len() {
                return Err(Error::LengthMismatch(t.trace.len(), t.prominence_db.len()));
            }
            map.insert(t.order, t);
        }
        let mut it = map.values();
        let first = it.next().ok_or(Error::TooFewSamples { needed: 1, got: 0 })?;
        for t in it {
            let (a, b) = (&first.trace, &t.trace);
            if a.len() != b.len() {
                return Err(Error::LengthMismatch(a.len(), b.len()));
            }
            if (a.t0() - b.t0()).abs() > 1e-9 || (a.step() - b.step()).abs() > 1e-12 {
                return Err(Error::config("harmonic traces are not aligned"));
            }
        }
        Ok(HarmonicTraces { tracks: map })
    }

    pub fn get(&self, order: usize) -> Option<&HarmonicTrack> {
        self.tracks.get(&order)
    }

    pub fn orders(&self) -> impl Iterator<Item = usize> + '_ {
        self.tracks.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = &HarmonicTrack> {
        self.tracks.values()
    }

    pub fn len(&self) -> usize {
        self.tracks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tracks.is_empty()
    }

    fn first(&self) -> &EnfTrace {
        &self.tracks.values().next().expect("non-empty by construction").trace
    }
}

/// Which harmonic supplied one segment of the selected trace.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentChoice {
    pub start: usize,
    pub len: usize,
    pub order: usize,
    pub score: f64,
    pub prominence_db: Option<f64>,
    pub low_confidence: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub trace: EnfTrace,
    pub segments: Vec<SegmentChoice>,
}

impl Selection {
    pub fn all_low_confidence(&self) -> bool {
        self.segments.iter().all(|s| s.low_confidence)
    }

    /// Order that supplied sample `i`.
    pub fn order_at(&self, i: usize) -> Option<usize> {
        self.segments
            .iter()
            .find(|s| (s.start..s.start + s.len).contains(&i))
            .map(|s| s.order)
    }
}

/// Maps a frequency tracked around harmonic `order_m` of the flicker back to
/// the mains frequency. The flicker runs at twice mains, so harmonic m sits
/// at 2m times the mains frequency.
pub fn normalize_to_baseband(raw: &EnfTrace, order_m: usize) -> Result<EnfTrace> {
    if order_m < 1 {
        return Err(Error::config("harmonic order must be at least 1"));
    }
    let k = 2.0 * order_m as f64;
    EnfTrace::new(raw.t0(), raw.step(), raw.values().iter().map(|f| f / k).collect())
}

/// Total variation of a segment: the sum of absolute first differences.
pub fn smoothness(segment: &[f64]) -> Result<f64> {
    if segment.len() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            got: segment.len(),
        });
    }
    Ok(segment.windows(2).map(|w| (w[1] - w[0]).abs()).sum())
}

/// Weakest peak prominence of a track over a segment.
fn segment_prominence(track: &HarmonicTrack, range: std::ops::Range<usize>) -> Option<f64> {
    (!track.prominence_db.is_empty()).then(|| track.prominence_db[range].iter().copied().fold(f64::INFINITY, f64::min))
}

/// Splices together, segment by segment, whichever harmonic is smoothest.
///
/// A harmonic whose spectral peak drops into the surrounding clutter at any
/// hop of a segment only competes there when no harmonic stays above the
/// prominence threshold throughout; a featureless band can otherwise yield a deceptively smooth
/// track. A trailing segment of a single sample cannot be scored and inherits the
/// previous segment's winner.
pub fn harmonic_select(traces: &HarmonicTraces, cfg: &HarmonicConfig) -> Result<Selection> {
    cfg.validate()?;
    let reference = traces.first();
    let n = reference.len();
    if n < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: n });
    }
    let seg = ((cfg.segment_s / reference.step()).round() as usize).max(2);
    let mut values = Vec::with_capacity(n);
    let mut segments: Vec<SegmentChoice> = Vec::new();

    for start in (0..n).step_by(seg) {
        let len = seg.min(n - start);
        let range = start..start + len;
        let (order, score) = if len >= 2 {
            let confident: Vec<&HarmonicTrack> = traces
                .iter()
                .filter(|t| segment_prominence(t, range.clone()).map_or(true, |p| p >= cfg.min_prominence_db))
                .collect();
            let candidates = if confident.is_empty() {
                traces.iter().collect()
            } else {
                confident
            };
            let mut best: Option<(usize, f64)> = None;
            for t in candidates {
                let s = smoothness(&t.trace.values()[range.clone()])?;
                if best.map_or(true, |(_, b)| s < b) {
                    best = Some((t.order, s));
                }
            }
            best.expect("at least one harmonic")
        } else {
            let prev = segments.last().expect("n >= 2 so an earlier segment exists");
            (prev.order, 0.0)
        };
        let track = traces.get(order).expect("winner comes from the map");
        let prominence_db = segment_prominence(track, range.clone());
        values.extend_from_slice(&track.trace.values()[range]);
        segments.push(SegmentChoice {
            start,
            len,
            order,
            score,
            prominence_db,
            low_confidence: prominence_db.is_some_and(|p| p < cfg.min_prominence_db),
        });
    }

    Ok(Selection {
        trace: EnfTrace::new(reference.t0(), reference.step(), values)?,
        segments,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::mae;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn trace(values: Vec<f64>) -> EnfTrace {
        EnfTrace::new(0.0, 1.0, values).unwrap()
    }

    #[test]
    fn baseband_examples() {
        let raw = trace(vec![200.04]);
        assert!((normalize_to_baseband(&raw, 2).unwrap().values()[0] - 50.01).abs() < 1e-12);
        let raw = trace(vec![100.0]);
        assert_eq!(normalize_to_baseband(&raw, 1).unwrap().values()[0], 50.0);
        let raw = trace(vec![300.12]);
        assert!((normalize_to_baseband(&raw, 3).unwrap().values()[0] - 50.02).abs() < 1e-12);
        assert!(normalize_to_baseband(&raw, 0).is_err());
    }

    #[test]
    fn smoothness_examples() {
        assert_eq!(smoothness(&[50.0, 50.0, 50.0]).unwrap(), 0.0);
        assert!((smoothness(&[50.0, 50.01, 50.0]).unwrap() - 0.02).abs() < 1e-12);
        assert!(smoothness(&[50.0]).is_err());
    }

    #[test]
    fn noise_is_rougher_than_a_ramp_of_equal_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let len = 50;
        let mut rougher = 0;
        for _ in 0..1000 {
            let noise: Vec<f64> = (0..len).map(|_| rng.random::<f64>()).collect();
            let (lo, hi) = noise
                .iter()
                .fold((f64::MAX, f64::MIN), |(a, b), &v| (a.min(v), b.max(v)));
            let ramp: Vec<f64> = (0..len).map(|i| lo + (hi - lo) * i as f64 / (len - 1) as f64).collect();
            if smoothness(&noise).unwrap() > smoothness(&ramp).unwrap() {
                rougher += 1;
            }
        }
        assert_eq!(rougher, 1000);
    }

    #[test]
    fn single_harmonic_passes_through() {
        let t = trace((0..37).map(|i| 50.0 + 0.001 * (i as f64).sin()).collect());
        let traces = HarmonicTraces::new([HarmonicTrack::new(1, t.clone())]).unwrap();
        let cfg = HarmonicConfig {
            max_order_m: 1,
            ..Default::default()
        };
        let sel = harmonic_select(&traces, &cfg).unwrap();
        assert_eq!(sel.trace, t);
        assert_eq!(sel.segments.len(), 4);
        assert_eq!(sel.segments[3].len, 7);
    }

    #[test]
    fn smoother_harmonic_wins_everywhere() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let truth: Vec<f64> = (0..60).map(|i| 50.0 + 0.01 * (i as f64 / 7.0).sin()).collect();
        let noisy: Vec<f64> = truth.iter().map(|v| v + 0.01 * (rng.random::<f64>() - 0.5)).collect();
        let traces = HarmonicTraces::new([
            HarmonicTrack::new(1, trace(noisy)),
            HarmonicTrack::new(2, trace(truth.clone())),
        ])
        .unwrap();
        let sel = harmonic_select(&traces, &HarmonicConfig::default()).unwrap();
        assert_eq!(sel.trace.values(), &truth[..]);
        assert!(sel.segments.iter().all(|s| s.order == 2));
    }

    #[test]
    fn switches_source_when_one_harmonic_degrades() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 100;
        let truth: Vec<f64> = (0..n).map(|i| 50.0 + 0.02 * (i as f64 / 9.0).sin()).collect();
        let jitter = |rng: &mut ChaCha8Rng, s: f64| s * (rng.random::<f64>() - 0.5);
        let h1: Vec<f64> = (0..n)
            .map(|i| {
                truth[i]
                    + if i < n / 2 {
                        jitter(&mut rng, 0.001)
                    } else {
                        jitter(&mut rng, 0.05)
                    }
            })
            .collect();
        let h2: Vec<f64> = (0..n).map(|i| truth[i] + jitter(&mut rng, 0.004)).collect();
        let traces = HarmonicTraces::new([
            HarmonicTrack::new(1, trace(h1.clone())),
            HarmonicTrack::new(2, trace(h2.clone())),
        ])
        .unwrap();
        let sel = harmonic_select(&traces, &HarmonicConfig::default()).unwrap();
        assert_eq!(sel.order_at(0), Some(1));
        assert_eq!(sel.order_at(n - 1), Some(2));
        let picked = mae(&sel.trace, &trace(truth.clone())).unwrap();
        let best_single = mae(&trace(h1), &trace(truth.clone()))
            .unwrap()
            .min(mae(&trace(h2), &trace(truth)).unwrap());
        assert!(picked < best_single, "{picked} vs {best_single}");
    }

    #[test]
    fn ties_go_to_the_lower_order() {
        let t = trace(vec![50.0; 20]);
        let traces = HarmonicTraces::new([HarmonicTrack::new(3, t.clone()), HarmonicTrack::new(2, t)]).unwrap();
        let sel = harmonic_select(&traces, &HarmonicConfig::default()).unwrap();
        assert!(sel.segments.iter().all(|s| s.order == 2));
    }

    #[test]
    fn single_sample_tail_inherits_previous_winner() {
        let mut a = vec![50.0; 21];
        a[20] = 51.0;
        let mut b = vec![50.0; 21];
        b[5] = 50.5;
        let traces = HarmonicTraces::new([HarmonicTrack::new(1, trace(a)), HarmonicTrack::new(2, trace(b))]).unwrap();
        let sel = harmonic_select(&traces, &HarmonicConfig::default()).unwrap();
        let tail = sel.segments.last().unwrap();
        assert_eq!((tail.start, tail.len, tail.order), (20, 1, 1));
        assert_eq!(sel.trace.values()[20], 51.0);
    }

    #[test]
    fn weak_peaks_do_not_compete_with_confident_ones() {
        let rough = trace((0..20).map(|i| 50.0 + 0.01 * (i % 2) as f64).collect());
        let flat = trace(vec![50.0; 20]);
        let traces = HarmonicTraces::new([
            HarmonicTrack::new(1, rough).with_prominence(vec![20.0; 20]),
            HarmonicTrack::new(2, flat).with_prominence(vec![1.0; 20]),
        ])
        .unwrap();
        let sel = harmonic_select(&traces, &HarmonicConfig::default()).unwrap();
        assert!(sel.segments.iter().all(|s| s.order == 1 && !s.low_confidence));
    }

    #[test]
    fn low_prominence_is_flagged() {
        let t = trace(vec![50.0; 20]);
        let tr = HarmonicTrack::new(1, t).with_prominence([vec![1.0; 10], vec![10.0; 10]].concat());
        let sel = harmonic_select(&HarmonicTraces::new([tr]).unwrap(), &HarmonicConfig::default()).unwrap();
        assert!(sel.segments[0].low_confidence);
        assert!(!sel.segments[1].low_confidence);
        assert!(!sel.all_low_confidence());
    }
}
