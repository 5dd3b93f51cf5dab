//! Time-varying window width selection.
//!
//! `sigma_sinusoidal` enforces the sinusoidal-model zone separation with
//! equality for the tightest adjacent pair; `sigma_chirp` does the same for
//! the linear-chirp zones, where each adjacent pair contributes the smaller
//! root of the quadratic that makes the zones touch. Both consume ground-truth
//! instantaneous frequencies and chirp rates from the signal specification.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{CwltError, Result};
use crate::signal::SignalSpec;
use crate::window::WindowSpec;

/// Per-time window width `sigma(t_m) > 0`, in seconds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmaProfile {
    pub values: Vec<f64>,
}

impl SigmaProfile {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(CwltError::Domain(
                "sigma profile must be finite and positive".into(),
            ));
        }
        Ok(SigmaProfile { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.len() as f64
    }
}

/// Constant profile of the given value at every time sample.
pub fn constant(value: f64, n: usize) -> Result<SigmaProfile> {
    if !(value > 0.0) || !value.is_finite() {
        return Err(CwltError::Usage(format!(
            "constant sigma must be positive, got {value}"
        )));
    }
    SigmaProfile::new(vec![value; n])
}

/// Sinusoidal-model width: per time, the maximum over adjacent pairs of
/// `(alpha/mu) (f_k + f_{k-1}) / (f_k - f_{k-1})`. A single component falls
/// back to the floor `alpha/mu`.
pub fn sigma_sinusoidal(
    spec: &SignalSpec,
    window: &WindowSpec,
    times: &[f64],
) -> Result<SigmaProfile> {
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        let mut best = window.alpha / window.mu;
        for k in 1..spec.num_components() {
            let lo = spec.component(k - 1).ifreq(t);
            let hi = spec.component(k).ifreq(t);
            if hi <= lo {
                return Err(CwltError::Crossover {
                    lower: k - 1,
                    upper: k,
                    t,
                });
            }
            best = best.max(window.alpha / window.mu * (hi + lo) / (hi - lo));
        }
        out.push(best);
    }
    SigmaProfile::new(out)
}

/// Smallest width at which the chirp zones of one adjacent pair touch.
/// Returns the sinusoidal pair value when both chirp rates vanish, and an
/// error (or the clamped value) when the separability discriminant is
/// negative.
fn chirp_pair_width(
    f_lo: f64,
    f_hi: f64,
    r_lo: f64,
    r_hi: f64,
    window: &WindowSpec,
    clamp: bool,
    pair: (usize, usize),
    t: f64,
) -> Result<f64> {
    let alpha = window.alpha;
    let gap = f_hi - f_lo;
    if gap <= 0.0 {
        return Err(CwltError::Crossover {
            lower: pair.0,
            upper: pair.1,
            t,
        });
    }
    let s = r_lo.abs() + r_hi.abs();
    if s == 0.0 {
        return Ok(alpha / window.mu * (f_hi + f_lo) / gap);
    }
    let p = f_hi * r_lo.abs() + f_lo * r_hi.abs();
    let beta = p * gap + 4.0 * PI * alpha * alpha * (r_hi * r_hi - r_lo * r_lo);
    let disc = gap * gap - 16.0 * PI * alpha * alpha * s;
    if disc < 0.0 {
        if !clamp {
            return Err(CwltError::NotSeparable {
                lower: pair.0,
                upper: pair.1,
                t,
                discriminant: disc,
            });
        }
        return Ok(beta / (4.0 * PI * alpha * window.mu * s * s));
    }
    // upsilon = p^2 * disc, so sqrt(upsilon) = p sqrt(disc).
    Ok((beta - p * disc.sqrt()) / (4.0 * PI * alpha * window.mu * s * s))
}

/// Linear-chirp-model width: per time, `max(alpha/mu, max over pairs)` of the
/// per-pair touching widths.
pub fn sigma_chirp(
    spec: &SignalSpec,
    window: &WindowSpec,
    times: &[f64],
    clamp_negative_discriminant: bool,
) -> Result<SigmaProfile> {
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        let mut best = window.alpha / window.mu;
        for k in 1..spec.num_components() {
            let lo = spec.component(k - 1);
            let hi = spec.component(k);
            let v = chirp_pair_width(
                lo.ifreq(t),
                hi.ifreq(t),
                lo.chirp_rate(t),
                hi.chirp_rate(t),
                window,
                clamp_negative_discriminant,
                (k - 1, k),
                t,
            )?;
            best = best.max(v);
        }
        out.push(best);
    }
    SigmaProfile::new(out)
}
