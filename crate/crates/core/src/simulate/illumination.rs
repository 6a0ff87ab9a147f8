use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trace::EnfTrace;

/// Sinusoidal flicker seen by one pixel: `A cos(Φ(t) + φ) + B`, where Φ is
/// twice the accumulated mains phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IlluminationModel {
    pub amplitude: f64,
    pub bias: f64,
    /// Initial phase, radians.
    pub phase: f64,
    /// Exponent of the frame camera response `v^gamma`.
    pub gamma: f64,
}

impl Default for IlluminationModel {
    fn default() -> Self {
        IlluminationModel {
            amplitude: 1.0,
            bias: 2.0,
            phase: 0.0,
            gamma: 1.0,
        }
    }
}

impl IlluminationModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.amplitude > 0.0 && self.bias > self.amplitude) || !self.bias.is_finite() {
            return Err(Error::ExpansionDiverges {
                amplitude: self.amplitude,
                bias: self.bias,
            });
        }
        if !(self.gamma > 0.0) {
            return Err(Error::config("gamma must be positive"));
        }
        Ok(())
    }

    /// Largest intensity the model reaches, used to normalise frames.
    pub fn peak(&self) -> f64 {
        self.amplitude + self.bias
    }
}

/// Running integral of an ENF trace, trapezoidal over the trace grid.
///
/// Stores cycles rather than radians; `phase` multiplies out at the end.
#[derive(Debug, Clone)]
pub struct PhaseIntegrator {
    t0: f64,
    step: f64,
    values: Vec<f64>,
    cumulative: Vec<f64>,
}

impl PhaseIntegrator {
    pub fn new(enf: &EnfTrace) -> Self {
        let v = enf.values();
        let h = enf.step();
        let mut cumulative = Vec::with_capacity(v.len());
        let mut acc = 0.0;
        cumulative.push(0.0);
        for w in v.windows(2) {
            acc += 0.5 * (w[0] + w[1]) * h;
            cumulative.push(acc);
        }
        PhaseIntegrator {
            t0: enf.t0(),
            step: h,
            values: v.to_vec(),
            cumulative,
        }
    }

    pub fn start(&self) -> f64 {
        self.t0
    }

    pub fn end(&self) -> f64 {
        self.t0 + (self.values.len() - 1) as f64 * self.step
    }

    pub fn contains(&self, t: f64) -> bool {
        let tol = 1e-9 * self.step;
        t >= self.t0 - tol && t <= self.end() + tol
    }

    /// Mains cycles elapsed between the trace start and `t`.
    pub fn cycles(&self, t: f64) -> Result<f64> {
        if !self.contains(t) {
            return Err(Error::OutsideSupport {
                t,
                start: self.t0,
                end: self.end(),
            });
        }
        let last = self.values.len() - 1;
        let pos = ((t - self.t0) / self.step).max(0.0);
        let i = (pos.floor() as usize).min(last.saturating_sub(1));
        if last == 0 {
            return Ok(self.values[0] * (t - self.t0));
        }
        let tau = t - (self.t0 + i as f64 * self.step);
        let slope = (self.values[i + 1] - self.values[i]) / self.step;
        Ok(self.cumulative[i] + self.values[i] * tau + 0.5 * slope * tau * tau)
    }

    /// Flicker phase `4π ∫ f_e`, radians.
    pub fn flicker_phase(&self, t: f64) -> Result<f64> {
        Ok(4.0 * PI * self.cycles(t)?)
    }
}

/// An illumination model bound to a specific ENF realisation.
#[derive(Debug, Clone)]
pub struct Illumination {
    model: IlluminationModel,
    phase: PhaseIntegrator,
}

impl Illumination {
    pub fn new(model: IlluminationModel, enf: &EnfTrace) -> Self {
        Illumination {
            model,
            phase: PhaseIntegrator::new(enf),
        }
    }

    pub fn model(&self) -> &IlluminationModel {
        &self.model
    }

    pub fn integrator(&self) -> &PhaseIntegrator {
        &self.phase
    }

    pub fn intensity(&self, t: f64) -> Result<f64> {
        let m = &self.model;
        Ok(m.amplitude * (self.phase.flicker_phase(t)? + m.phase).cos() + m.bias)
    }
}

/// Intensity of the flickering source at time `t`.
pub fn illumination_at(model: &IlluminationModel, enf: &EnfTrace, t: f64) -> Result<f64> {
    Illumination::new(*model, enf).intensity(t)
}

/// A mains-proportional voltage `cos(2π ∫ f_e)` sampled at `sample_rate`,
/// standing in for a sound-card recording of the grid.
pub fn mains_signal(enf: &EnfTrace, sample_rate: f64) -> Result<Vec<f64>> {
    if !(sample_rate > 0.0) {
        return Err(Error::config("sample rate must be positive"));
    }
    let integ = PhaseIntegrator::new(enf);
    let n = ((integ.end() - integ.start()) * sample_rate + 1e-9).floor() as usize + 1;
    (0..n)
        .map(|i| {
            let t = integ.start() + i as f64 / sample_rate;
            Ok((2.0 * PI * integ.cycles(t)?).cos())
        })
        .collect()
}

/// Fourier coefficients of `log(A cos ω + B)`: a constant `log p` followed
/// by the weights of `cos(mω)` for `m = 1..=M`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogExpansion {
    pub p: f64,
    pub q: f64,
    /// `coeffs[0] = log p`, `coeffs[m] = 2 (-1)^(m-1) q^m / m`.
    pub coeffs: Vec<f64>,
}

impl LogExpansion {
    /// Truncated series evaluated at `omega`.
    pub fn evaluate(&self, omega: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .fold(self.coeffs[0], |acc, (m, c)| acc + c * (m as f64 * omega).cos())
    }
}

pub fn log_expansion_coeffs(model: &IlluminationModel, order_m: usize) -> Result<LogExpansion> {
    let (a, b) = (model.amplitude, model.bias);
    if !(a > 0.0 && b > a) {
        return Err(Error::ExpansionDiverges { amplitude: a, bias: b });
    }
    if order_m < 1 {
        return Err(Error::config("expansion order must be at least 1"));
    }
    let root = (b * b - a * a).sqrt();
    let p = (b + root) / 2.0;
    // (B - root) / A, rewritten to avoid cancellation when A << B.
    let q = a / (b + root);
    let mut coeffs = Vec::with_capacity(order_m + 1);
    coeffs.push(p.ln());
    let mut qm = 1.0;
    for m in 1..=order_m {
        qm *= q;
        let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
        coeffs.push(2.0 * sign * qm / m as f64);
    }
    Ok(LogExpansion { p, q, coeffs })
}
