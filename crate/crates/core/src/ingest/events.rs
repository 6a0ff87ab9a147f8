use std::io::Write;
use std::path::Path;

use super::{comment_pairs, create, finish, lines, parse_field};
use crate::error::{Error, Result};
use crate::event::{Event, EventStream, Polarity};

const HEADER: &str = "t_s,x,y,p";

/// Reads `t_s,x,y,p` rows. Polarity may be written as -1/1 or 0/1. Sensor
/// size comes from a `# width=..,height=..` comment, or else from the
/// largest coordinates seen.
pub fn read_events_csv(path: impl AsRef<Path>) -> Result<EventStream> {
    let path = path.as_ref();
    let mut dims: (Option<u16>, Option<u16>) = (None, None);
    let mut events = Vec::new();
    let mut seen_header = false;
    for (line, text) in lines(path)? {
        let text = text.trim();
        if text.is_empty() {
            continue;
        }
        if text.starts_with('#') {
            for (k, v) in comment_pairs(text) {
                match k.as_str() {
                    "width" => dims.0 = Some(parse_field(line, &v, "width")?),
                    "height" => dims.1 = Some(parse_field(line, &v, "height")?),
                    _ => {}
                }
            }
            continue;
        }
        if !seen_header {
            seen_header = true;
            if text.replace(' ', "") == HEADER {
                continue;
            }
        }
        let fields: Vec<&str> = text.split(',').collect();
        if fields.len() != 4 {
            return Err(Error::Parse {
                line,
                message: format!("expected 4 fields, found {}", fields.len()),
            });
        }
        let t: f64 = parse_field(line, fields[0], "t_s")?;
        let x: u16 = parse_field(line, fields[1], "x")?;
        let y: u16 = parse_field(line, fields[2], "y")?;
        let p: i8 = parse_field(line, fields[3], "p")?;
        let polarity = match p {
            1 => Polarity::On,
            0 | -1 => Polarity::Off,
            _ => {
                return Err(Error::Parse {
                    line,
                    message: format!("polarity must be -1, 0 or 1, got {p}"),
                })
            }
        };
        if !t.is_finite() || t < 0.0 {
            return Err(Error::Parse {
                line,
                message: format!("invalid timestamp {t}"),
            });
        }
        if dims.0.is_some_and(|w| x >= w) || dims.1.is_some_and(|h| y >= h) {
            return Err(Error::Parse {
                line,
                message: format!("coordinate ({x}, {y}) outside the declared sensor"),
            });
        }
        events.push(Event::new(t, x, y, polarity));
    }
    let infer = |f: fn(&Event) -> u16| events.iter().map(f).max().map_or(1, |m| m.saturating_add(1));
    let width = dims.0.unwrap_or_else(|| infer(|e| e.x));
    let height = dims.1.unwrap_or_else(|| infer(|e| e.y));
    EventStream::new(width, height, events)
}

/// Writes the stream with nanosecond timestamps and -1/1 polarities.
pub fn write_events_csv(stream: &EventStream, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = create(path)?;
    let io = |e| Error::io(path, e);
    writeln!(w, "# width={},height={}", stream.width(), stream.height()).map_err(io)?;
    writeln!(w, "{HEADER}").map_err(io)?;
    for e in stream.events() {
        writeln!(w, "{:.9},{},{},{}", e.t, e.x, e.y, e.polarity.as_i8()).map_err(io)?;
    }
    finish(path, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    #[test]
    fn reads_three_rows_and_maps_zero_polarity() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("e.csv");
        fs::write(&p, "t_s,x,y,p\n0.1,0,1,1\n0.2,2,0,0\n0.3,1,1,-1\n").unwrap();
        let s = read_events_csv(&p).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!((s.width(), s.height()), (3, 2));
        let pol: Vec<i8> = s.events().iter().map(|e| e.polarity.as_i8()).collect();
        assert_eq!(pol, vec![1, -1, -1]);
    }

    #[test]
    fn reports_the_bad_line() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("e.csv");
        fs::write(&p, "t_s,x,y,p\n0.1,0,1,1\n0.5,10,abc,1\n").unwrap();
        let err = read_events_csv(&p).unwrap_err();
        assert_eq!(err.to_string(), "line 3: unparsable y");
    }

    #[test]
    fn rejects_coordinates_outside_declared_size() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("e.csv");
        fs::write(&p, "# width=2,height=2\nt_s,x,y,p\n0.1,2,0,1\n").unwrap();
        assert!(matches!(read_events_csv(&p), Err(Error::Parse { line: 3, .. })));
    }

    #[test]
    fn empty_stream_is_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("e.csv");
        write_events_csv(&EventStream::new(4, 4, vec![]).unwrap(), &p).unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "# width=4,height=4\nt_s,x,y,p\n");
        assert!(read_events_csv(&p).unwrap().is_empty());
    }

    #[test]
    fn ties_keep_their_order() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("e.csv");
        let events = vec![
            Event::new(0.5, 1, 0, Polarity::On),
            Event::new(0.5, 0, 1, Polarity::Off),
            Event::new(0.25, 1, 1, Polarity::On),
        ];
        let s = EventStream::new(2, 2, events).unwrap();
        write_events_csv(&s, &p).unwrap();
        let back = read_events_csv(&p).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.events()[1].x, 1);
    }
}
