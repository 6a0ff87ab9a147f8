use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Analysis window for the STFT, drawn from the tapered-cosine family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum WindowShape {
    Hann,
    Hamming,
    Rectangular,
    /// Cosine-tapered flat top; `alpha` is the tapered fraction (0 is
    /// rectangular, 1 is Hann).
    Tukey(f64),
}

impl WindowShape {
    /// Periodic window of length `n`.
    pub fn coefficients(&self, n: usize) -> Vec<f64> {
        let nf = n as f64;
        match *self {
            WindowShape::Hann => (0..n).map(|k| 0.5 - 0.5 * (2.0 * PI * k as f64 / nf).cos()).collect(),
            WindowShape::Hamming => (0..n).map(|k| 0.54 - 0.46 * (2.0 * PI * k as f64 / nf).cos()).collect(),
            WindowShape::Rectangular => vec![1.0; n],
            WindowShape::Tukey(alpha) => {
                if alpha <= 0.0 {
                    return vec![1.0; n];
                }
                let taper = alpha * nf / 2.0;
                (0..n)
                    .map(|k| {
                        let k = k as f64;
                        let edge = k.min(nf - k);
                        if edge < taper {
                            0.5 - 0.5 * (PI * edge / taper).cos()
                        } else {
                            1.0
                        }
                    })
                    .collect()
            }
        }
    }
}

impl FromStr for WindowShape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        match s.as_str() {
            "hann" | "hanning" => Ok(WindowShape::Hann),
            "hamming" => Ok(WindowShape::Hamming),
            "rectangular" | "rect" | "boxcar" => Ok(WindowShape::Rectangular),
            _ => {
                let alpha = s
                    .strip_prefix("tukey(")
                    .and_then(|r| r.strip_suffix(')'))
                    .and_then(|a| a.parse::<f64>().ok())
                    .filter(|a| (0.0..=1.0).contains(a))
                    .ok_or_else(|| Error::config(format!("unknown window shape '{s}'")))?;
                Ok(WindowShape::Tukey(alpha))
            }
        }
    }
}

impl fmt::Display for WindowShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WindowShape::Hann => f.write_str("hann"),
            WindowShape::Hamming => f.write_str("hamming"),
            WindowShape::Rectangular => f.write_str("rectangular"),
            WindowShape::Tukey(a) => write!(f, "tukey({a})"),
        }
    }
}

impl TryFrom<String> for WindowShape {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<WindowShape> for String {
    fn from(w: WindowShape) -> String {
        w.to_string()
    }
}
