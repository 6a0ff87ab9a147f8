//! Timestamped polarity events as emitted by a dynamic vision sensor.

use crate::error::{Error, Result};

/// Sign of the log-intensity change that fired an event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(i8)]
pub enum Polarity {
    Off = -1,
    On = 1,
}

impl Polarity {
    pub fn as_i8(self) -> i8 {
        self as i8
    }

    pub fn flipped(self) -> Polarity {
        match self {
            Polarity::On => Polarity::Off,
            Polarity::Off => Polarity::On,
        }
    }
}

impl TryFrom<i8> for Polarity {
    type Error = i8;

    fn try_from(v: i8) -> std::result::Result<Self, i8> {
        match v {
            1 => Ok(Polarity::On),
            -1 => Ok(Polarity::Off),
            other => Err(other),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    /// Seconds since the start of the recording.
    pub t: f64,
    pub x: u16,
    pub y: u16,
    pub polarity: Polarity,
}

impl Event {
    pub fn new(t: f64, x: u16, y: u16, polarity: Polarity) -> Self {
        Event { t, x, y, polarity }
    }
}

/// Time-ordered events from a `width` x `height` sensor.
#[derive(Debug, Clone, PartialEq)]
pub struct EventStream {
    width: u16,
    height: u16,
    events: Vec<Event>,
}

impl EventStream {
    /// Builds a stream, sorting by timestamp (stable, so ties keep their
    /// input order) and checking coordinates against the sensor bounds.
    pub fn new(width: u16, height: u16, mut events: Vec<Event>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::config("sensor dimensions must be non-zero"));
        }
        for (i, e) in events.iter().enumerate() {
            if !e.t.is_finite() || e.t < 0.0 {
                return Err(Error::config(format!("event {i} has invalid timestamp {}", e.t)));
            }
            if e.x >= width || e.y >= height {
                return Err(Error::config(format!(
                    "event {i} at ({}, {}) outside {width}x{height} sensor",
                    e.x, e.y
                )));
            }
        }
        if !events.windows(2).all(|w| w[0].t <= w[1].t) {
            events.sort_by(|a, b| a.t.total_cmp(&b.t));
        }
        Ok(EventStream { width, height, events })
    }

    pub fn width(&self) -> u16 {
        self.width
    }

    pub fn height(&self) -> u16 {
        self.height
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn start_time(&self) -> Option<f64> {
        self.events.first().map(|e| e.t)
    }

    pub fn end_time(&self) -> Option<f64> {
        self.events.last().map(|e| e.t)
    }

    pub fn duration(&self) -> f64 {
        match (self.start_time(), self.end_time()) {
            (Some(a), Some(b)) => b - a,
            _ => 0.0,
        }
    }

    /// Same stream with every polarity inverted.
    pub fn with_flipped_polarity(&self) -> EventStream {
        EventStream {
            width: self.width,
            height: self.height,
            events: self
                .events
                .iter()
                .map(|e| Event {
                    polarity: e.polarity.flipped(),
                    ..*e
                })
                .collect(),
        }
    }

    /// Merges extra events into the stream, keeping it time-ordered.
    pub fn merged_with(&self, extra: impl IntoIterator<Item = Event>) -> Result<EventStream> {
        let mut events = self.events.clone();
        events.extend(extra);
        EventStream::new(self.width, self.height, events)
    }
}
