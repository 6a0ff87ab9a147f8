use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::event::{Event, EventStream};
use crate::trace::PolaritySequence;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplingConfig {
    /// Sampling interval Δt, seconds.
    pub delta_t: f64,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        SamplingConfig { delta_t: 0.001 }
    }
}

impl SamplingConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta_t > 0.0) || !self.delta_t.is_finite() {
            return Err(Error::config("delta_t must be positive"));
        }
        Ok(())
    }
}

/// One event cohort per sampling moment, as index ranges into the stream.
#[derive(Debug, Clone)]
pub struct TemporalSlices<'a> {
    stream: &'a EventStream,
    t1: f64,
    delta_t: f64,
    ranges: Vec<Range<usize>>,
}

impl<'a> TemporalSlices<'a> {
    pub fn len(&self) -> usize {
        self.ranges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranges.is_empty()
    }

    /// Sampling moment of slice `n`.
    pub fn moment(&self, n: usize) -> f64 {
        self.t1 + n as f64 * self.delta_t
    }

    pub fn start(&self) -> f64 {
        self.t1
    }

    pub fn delta_t(&self) -> f64 {
        self.delta_t
    }

    pub fn ranges(&self) -> &[Range<usize>] {
        &self.ranges
    }

    pub fn slice(&self, n: usize) -> &'a [Event] {
        &self.stream.events()[self.ranges[n].clone()]
    }

    pub fn iter(&self) -> impl Iterator<Item = &'a [Event]> + '_ {
        self.ranges.iter().map(|r| &self.stream.events()[r.clone()])
    }
}

/// Frames the asynchronous stream onto the grid `t1 + nΔt`.
///
/// Slice `n` is the cohort of events sharing the earliest timestamp at or
/// after the sampling moment; everything between picks is dropped. Sampling
/// runs up to and including the last event time.
pub fn temporal_sample<'a>(stream: &'a EventStream, cfg: &SamplingConfig) -> Result<TemporalSlices<'a>> {
    cfg.validate()?;
    let events = stream.events();
    let (t1, tn) = match (stream.start_time(), stream.end_time()) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::EmptyStream),
    };
    let count = ((tn - t1) / cfg.delta_t).floor() as usize + 1;
    let mut ranges = Vec::with_capacity(count);
    let mut i = 0usize;
    for n in 0.. {
        let moment = t1 + n as f64 * cfg.delta_t;
        if moment > tn {
            break;
        }
        while events[i].t < moment {
            i += 1;
        }
        let stamp = events[i].t;
        let mut j = i + 1;
        while j < events.len() && events[j].t == stamp {
            j += 1;
        }
        ranges.push(i..j);
    }
    Ok(TemporalSlices {
        stream,
        t1,
        delta_t: cfg.delta_t,
        ranges,
    })
}

/// Collapses each slice to `sgn(N+ − N−)`, with ties mapped to zero.
pub fn spatial_vote(slices: &TemporalSlices<'_>) -> Result<PolaritySequence> {
    let values = slices.iter().map(vote).collect();
    PolaritySequence::new(slices.t1, slices.delta_t, values)
}

pub(crate) fn vote(slice: &[Event]) -> i8 {
    let balance: i64 = slice.iter().map(|e| i64::from(e.polarity.as_i8())).sum();
    balance.signum() as i8
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event::Polarity;

    fn stream(times: &[f64]) -> EventStream {
        let ev = times
            .iter()
            .enumerate()
            .map(|(i, &t)| Event::new(t, i as u16 % 8, 0, Polarity::On))
            .collect();
        EventStream::new(8, 1, ev).unwrap()
    }

    fn slice_times(s: &TemporalSlices<'_>) -> Vec<Vec<f64>> {
        s.iter().map(|sl| sl.iter().map(|e| e.t).collect()).collect()
    }

    #[test]
    fn nearest_future_cohorts() {
        let s = stream(&[0.0, 0.0004, 0.0011, 0.0012, 0.0025]);
        let slices = temporal_sample(&s, &SamplingConfig::default()).unwrap();
        assert_eq!(slice_times(&slices), vec![vec![0.0], vec![0.0011], vec![0.0025]]);
    }

    #[test]
    fn single_event_gives_one_slice() {
        let s = stream(&[0.5]);
        let slices = temporal_sample(&s, &SamplingConfig::default()).unwrap();
        assert_eq!(slice_times(&slices), vec![vec![0.5]]);
    }

    #[test]
    fn events_on_the_grid_are_taken_as_is() {
        let s = stream(&[0.0, 0.0, 0.001, 0.002, 0.002, 0.002]);
        let slices = temporal_sample(&s, &SamplingConfig::default()).unwrap();
        let sizes: Vec<usize> = slices.iter().map(|s| s.len()).collect();
        assert_eq!(sizes, vec![2, 1, 3]);
    }

    #[test]
    fn empty_stream_is_rejected() {
        let s = EventStream::new(1, 1, vec![]).unwrap();
        assert!(matches!(
            temporal_sample(&s, &SamplingConfig::default()),
            Err(Error::EmptyStream)
        ));
    }

    #[test]
    fn majority_vote() {
        let e = |p| Event::new(0.0, 0, 0, p);
        use Polarity::{Off, On};
        assert_eq!(vote(&[e(On), e(On), e(Off)]), 1);
        assert_eq!(vote(&[e(On), e(Off)]), 0);
        assert_eq!(vote(&[e(Off), e(Off), e(Off), e(On)]), -1);
    }
}
