//! The adaptive transform itself: a direct truncated Riemann sum per
//! (scale, time) cell, column-parallel.
//!
//! With `u = b + a t`, the transform of a sampled signal is
//!
//! `W(a, b) = (1/(a s)) sum_j x(u_j) g((u_j - b)/(a s)) e^{-i 2 pi mu (u_j - b)/a} du`
//!
//! where `s = sigma(b)` and the sum runs over `|u_j - b| <= t_half * a * s`.
//! Samples outside the record are treated as zero. Time-varying `sigma`
//! breaks the convolution structure, so there is no FFT fast path; at the
//! problem sizes here the direct sum is fast enough.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{CwltError, Result};
use crate::signal::{SampledSignal, SignalKind};
use crate::sigma::SigmaProfile;
use crate::window::WindowSpec;

/// Default truncation half-width in units of `t / sigma`; `g(6) < 7e-9`.
pub const DEFAULT_T_HALF: f64 = 6.0;

/// Ascending linear frequency grid; scales are `a_i = mu / xi_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    pub freqs: Vec<f64>,
}

impl FrequencyGrid {
    pub fn linear(xi_min: f64, xi_max: f64, n_freq: usize) -> Result<Self> {
        if !(xi_min > 0.0 && xi_max > xi_min) {
            return Err(CwltError::Usage(format!(
                "need 0 < xi_min < xi_max, got [{xi_min}, {xi_max}]"
            )));
        }
        if n_freq < 2 {
            return Err(CwltError::Usage("grid needs at least 2 bins".into()));
        }
        let step = (xi_max - xi_min) / (n_freq - 1) as f64;
        Ok(FrequencyGrid {
            freqs: (0..n_freq).map(|i| xi_min + step * i as f64).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.freqs.len()
    }
    pub fn is_empty(&self) -> bool {
        self.freqs.is_empty()
    }

    /// Index of the grid frequency nearest to `xi`.
    pub fn nearest_bin(&self, xi: f64) -> usize {
        let n = self.freqs.len();
        let lo = self.freqs[0];
        let step = (self.freqs[n - 1] - lo) / (n - 1) as f64;
        let i = ((xi - lo) / step).round();
        (i.max(0.0) as usize).min(n - 1)
    }
}

/// Default analysis grid for a signal: linear from `fs/n` to `0.49 fs`.
pub fn default_grid(sig: &SampledSignal, n_freq: usize) -> Result<FrequencyGrid> {
    if n_freq < 16 {
        return Err(CwltError::Usage(format!(
            "default grid needs n_freq >= 16, got {n_freq}"
        )));
    }
    let fs = sig.sample_rate;
    FrequencyGrid::linear(fs / sig.len() as f64, 0.5 * fs * 0.98, n_freq)
}

/// Descriptor of the transformed signal, carried along for serialization.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SourceMeta {
    pub n: usize,
    pub sample_rate: f64,
    pub t_start: f64,
    pub kind: SignalKind,
}

/// Complex transform values on a frequency x time grid, stored column-major
/// (one time column contiguous).
#[derive(Debug, Clone)]
pub struct TfRepresentation {
    pub values: Vec<Complex64>,
    pub grid: FrequencyGrid,
    pub sigma: SigmaProfile,
    pub window: WindowSpec,
    pub meta: SourceMeta,
}

impl TfRepresentation {
    pub fn n_freq(&self) -> usize {
        self.grid.len()
    }
    pub fn n_time(&self) -> usize {
        self.meta.n
    }
    #[inline]
    pub fn at(&self, i_freq: usize, m_time: usize) -> Complex64 {
        self.values[m_time * self.grid.len() + i_freq]
    }
    pub fn column(&self, m_time: usize) -> &[Complex64] {
        let n = self.grid.len();
        &self.values[m_time * n..(m_time + 1) * n]
    }
    pub fn times(&self) -> Vec<f64> {
        (0..self.meta.n)
            .map(|m| self.meta.t_start + m as f64 / self.meta.sample_rate)
            .collect()
    }
}

/// Computes the adaptive transform of `sig` over `grid` with per-time width
/// `sigma`, truncating the window at `t_half` sigma-units.
pub fn transform(
    sig: &SampledSignal,
    grid: &FrequencyGrid,
    sigma: &SigmaProfile,
    window: &WindowSpec,
    t_half: f64,
) -> Result<TfRepresentation> {
    if grid.is_empty() {
        return Err(CwltError::Usage("empty frequency grid".into()));
    }
    if sigma.len() != sig.len() {
        return Err(CwltError::Usage(format!(
            "sigma profile length {} does not match signal length {}",
            sigma.len(),
            sig.len()
        )));
    }
    let nyquist = sig.sample_rate / 2.0;
    let (lo, hi) = (grid.freqs[0], *grid.freqs.last().unwrap());
    if !(lo > 0.0) || hi > nyquist + 1e-9 {
        return Err(CwltError::Usage(format!(
            "grid [{lo}, {hi}] outside (0, {nyquist}]"
        )));
    }
    if !(t_half > 0.0) {
        return Err(CwltError::Usage("t_half must be positive".into()));
    }

    let n = sig.len();
    let n_freq = grid.len();
    let fs = sig.sample_rate;
    let du = 1.0 / fs;
    let t0 = sig.t_start;
    let mu = window.mu;
    let norm = 1.0 / (2.0 * PI).sqrt();

    let mut values = vec![Complex64::new(0.0, 0.0); n * n_freq];
    values
        .par_chunks_mut(n_freq)
        .enumerate()
        .for_each(|(m, col)| {
            let tm = t0 + m as f64 / fs;
            let s = sigma.values[m];
            for (i, &xi) in grid.freqs.iter().enumerate() {
                let a = mu / xi;
                let half = t_half * a * s;
                let j0 = (((tm - half - t0) * fs).ceil() as i64).max(0) as usize;
                let j1 = (((tm + half - t0) * fs).floor() as i64).min(n as i64 - 1);
                if j1 < j0 as i64 {
                    continue;
                }
                let j1 = j1 as usize;
                // Phase advances by a fixed step per sample; rotate instead of
                // re-evaluating sin/cos.
                let dtheta = -2.0 * PI * mu * du / a;
                let rot = Complex64::from_polar(1.0, dtheta);
                let u0 = t0 + j0 as f64 * du;
                let mut phase = Complex64::from_polar(1.0, -2.0 * PI * mu * (u0 - tm) / a);
                let inv_as = 1.0 / (a * s);
                let mut acc = Complex64::new(0.0, 0.0);
                for j in j0..=j1 {
                    let v = (t0 + j as f64 * du - tm) * inv_as;
                    let gv = (-0.5 * v * v).exp();
                    acc += sig.samples[j] * phase * gv;
                    phase *= rot;
                }
                col[i] = acc * (norm * du * inv_as);
            }
        });

    Ok(TfRepresentation {
        values,
        grid: grid.clone(),
        sigma: sigma.clone(),
        window: *window,
        meta: SourceMeta {
            n,
            sample_rate: fs,
            t_start: t0,
            kind: sig.kind,
        },
    })
}
