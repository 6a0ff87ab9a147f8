use std::fs;
use std::io::Write;
use std::path::Path;

use super::{create, finish, parse_field};
use crate::error::{Error, Result};
use crate::simulate::{FrameSequence, Shutter};

const MANIFEST: &str = "manifest.txt";
const MAXVAL: u32 = 65535;

fn frame_name(k: usize) -> String {
    format!("frame_{k:06}.pgm")
}

/// Writes binary 16-bit PGMs plus `manifest.txt` into `dir`. 8-bit levels
/// survive the round trip exactly; finer values are rounded to 16 bits.
pub fn write_frames(frames: &FrameSequence, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let manifest = dir.join(MANIFEST);
    let mut w = create(&manifest)?;
    writeln!(
        w,
        "fps={}\nshutter={}\nrow_readout_s={}\nwidth={}\nheight={}\ncount={}",
        frames.fps,
        frames.shutter,
        frames.row_readout,
        frames.width,
        frames.height,
        frames.frames.len()
    )
    .map_err(|e| Error::io(&manifest, e))?;
    finish(&manifest, w)?;

    for (k, frame) in frames.frames.iter().enumerate() {
        let path = dir.join(frame_name(k));
        let mut bytes = format!("P5\n{} {}\n{MAXVAL}\n", frames.width, frames.height).into_bytes();
        bytes.reserve(frame.len() * 2);
        for &v in frame {
            let level = (f64::from(v.clamp(0.0, 1.0)) * f64::from(MAXVAL)).round() as u16;
            bytes.extend_from_slice(&level.to_be_bytes());
        }
        fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}

/// Reads a directory written by [`write_frames`].
pub fn read_frames(dir: impl AsRef<Path>) -> Result<FrameSequence> {
    let dir = dir.as_ref();
    let manifest = dir.join(MANIFEST);
    let text = fs::read_to_string(&manifest).map_err(|e| Error::io(&manifest, e))?;
    let get = |key: &str| -> Result<String> {
        text.lines()
            .find_map(|l| {
                let (k, v) = l.split_once('=')?;
                (k.trim() == key).then(|| v.trim().to_string())
            })
            .ok_or_else(|| Error::Parse {
                line: 0,
                message: format!("manifest lacks '{key}'"),
            })
    };
    let fps: f64 = parse_field(0, &get("fps")?, "fps")?;
    let shutter: Shutter = get("shutter")?.parse()?;
    let row_readout: f64 = parse_field(0, &get("row_readout_s")?, "row_readout_s")?;
    let width: usize = parse_field(0, &get("width")?, "width")?;
    let height: usize = parse_field(0, &get("height")?, "height")?;
    let count: usize = parse_field(0, &get("count")?, "count")?;

    let frames = (0..count)
        .map(|k| read_pgm(&dir.join(frame_name(k)), width, height))
        .collect::<Result<Vec<_>>>()?;
    let seq = FrameSequence {
        width,
        height,
        fps,
        shutter,
        row_readout,
        frames,
    };
    seq.validate()?;
    Ok(seq)
}

fn read_pgm(path: &Path, width: usize, height: usize) -> Result<Vec<f32>> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let bad = |m: &str| Error::config(format!("{}: {m}", path.display()));
    // Header: magic, width, height, maxval, each whitespace-separated.
    let mut fields = Vec::with_capacity(4);
    let mut pos = 0;
    while fields.len() < 4 {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(bad("truncated PGM header"));
        }
        fields.push(String::from_utf8_lossy(&bytes[start..pos]).into_owned());
    }
    pos += 1;
    if fields[0] != "P5" {
        return Err(bad("not a binary PGM"));
    }
    let dims: (usize, usize) = (
        fields[1].parse().map_err(|_| bad("bad width"))?,
        fields[2].parse().map_err(|_| bad("bad height"))?,
    );
    if dims != (width, height) {
        return Err(bad("frame size disagrees with the manifest"));
    }
    let maxval: u32 = fields[3].parse().map_err(|_| bad("bad maxval"))?;
    if maxval == 0 || maxval > MAXVAL {
        return Err(bad("maxval out of range"));
    }
    let wide = maxval > 255;
    let need = width * height * if wide { 2 } else { 1 };
    let data = bytes.get(pos..pos + need).ok_or_else(|| bad("truncated pixel data"))?;
    let scale = maxval as f32;
    Ok(if wide {
        data.chunks_exact(2)
            .map(|c| f32::from(u16::from_be_bytes([c[0], c[1]])) / scale)
            .collect()
    } else {
        data.iter().map(|&b| f32::from(b) / scale).collect()
    })
}
