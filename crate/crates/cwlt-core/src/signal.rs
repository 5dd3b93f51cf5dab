//! Analytic multicomponent AM-FM signal specifications, sampling, and noise.
//!
//! A component is a set of closures for the instantaneous amplitude `A(t)`,
//! the phase `phi(t)` in cycles, and its first three derivatives. Phases are
//! kept in cycles so every formula carries an explicit `2 pi`.

use num_complex::Complex64;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{CwltError, Result};

type TimeFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// One AM-FM component: amplitude, phase (cycles) and phase derivatives.
#[derive(Clone)]
pub struct Component {
    amplitude: TimeFn,
    phase: TimeFn,
    ifreq: TimeFn,
    chirp_rate: TimeFn,
    jerk: TimeFn,
}

impl Component {
    pub fn new(
        amplitude: impl Fn(f64) -> f64 + Send + Sync + 'static,
        phase: impl Fn(f64) -> f64 + Send + Sync + 'static,
        ifreq: impl Fn(f64) -> f64 + Send + Sync + 'static,
        chirp_rate: impl Fn(f64) -> f64 + Send + Sync + 'static,
        jerk: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Component {
            amplitude: Arc::new(amplitude),
            phase: Arc::new(phase),
            ifreq: Arc::new(ifreq),
            chirp_rate: Arc::new(chirp_rate),
            jerk: Arc::new(jerk),
        }
    }

    pub fn amplitude(&self, t: f64) -> f64 {
        (self.amplitude)(t)
    }
    /// Phase in cycles.
    pub fn phase(&self, t: f64) -> f64 {
        (self.phase)(t)
    }
    /// Instantaneous frequency `phi'(t)` in Hz.
    pub fn ifreq(&self, t: f64) -> f64 {
        (self.ifreq)(t)
    }
    /// Chirp rate `phi''(t)` in Hz/s.
    pub fn chirp_rate(&self, t: f64) -> f64 {
        (self.chirp_rate)(t)
    }
    /// `phi'''(t)` in Hz/s^2.
    pub fn jerk(&self, t: f64) -> f64 {
        (self.jerk)(t)
    }
}

impl std::fmt::Debug for Component {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Component").finish_non_exhaustive()
    }
}

/// Ordered multicomponent signal specification over an interval.
#[derive(Debug, Clone)]
pub struct SignalSpec {
    components: Vec<Component>,
    t_start: f64,
    t_end: f64,
    name: Option<String>,
}

impl SignalSpec {
    pub fn new(components: Vec<Component>, t_start: f64, t_end: f64) -> Result<Self> {
        if components.is_empty() {
            return Err(CwltError::Usage("signal needs at least one component".into()));
        }
        if !(t_end > t_start) || !t_start.is_finite() || !t_end.is_finite() {
            return Err(CwltError::Usage(format!(
                "degenerate interval [{t_start}, {t_end}]"
            )));
        }
        Ok(SignalSpec {
            components,
            t_start,
            t_end,
            name: None,
        })
    }

    fn with_name(mut self, name: &str) -> Self {
        self.name = Some(name.to_string());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }
    pub fn num_components(&self) -> usize {
        self.components.len()
    }
    pub fn components(&self) -> &[Component] {
        &self.components
    }
    pub fn component(&self, k: usize) -> &Component {
        &self.components[k]
    }
    pub fn interval(&self) -> (f64, f64) {
        (self.t_start, self.t_end)
    }

    /// Checks `phi'_{k-1}(t) < phi'_k(t)` on a dense grid.
    pub fn check_if_ordering(&self, n_grid: usize) -> Result<()> {
        for i in 0..n_grid {
            let t = self.t_start
                + (self.t_end - self.t_start) * i as f64 / (n_grid.max(2) - 1) as f64;
            for k in 1..self.components.len() {
                let lo = self.components[k - 1].ifreq(t);
                let hi = self.components[k].ifreq(t);
                if !(lo < hi) {
                    return Err(CwltError::Crossover {
                        lower: k - 1,
                        upper: k,
                        t,
                    });
                }
            }
        }
        Ok(())
    }

    /// Samples `sum_k A_k(t) e^{i 2 pi phi_k(t)}` (complex) or the cosine form
    /// (real) at `n` uniform points starting at `t_start`.
    pub fn sample(&self, n: usize, kind: SignalKind) -> Result<SampledSignal> {
        if n < 8 {
            return Err(CwltError::Usage(format!("need at least 8 samples, got {n}")));
        }
        let fs = n as f64 / (self.t_end - self.t_start);
        let mut samples = Vec::with_capacity(n);
        for m in 0..n {
            let t = self.t_start + m as f64 / fs;
            let mut acc = Complex64::new(0.0, 0.0);
            for c in &self.components {
                let a = c.amplitude(t);
                let p = c.phase(t);
                if !a.is_finite() || !p.is_finite() {
                    return Err(CwltError::Domain(format!(
                        "non-finite amplitude or phase at t = {t}"
                    )));
                }
                match kind {
                    SignalKind::Complex => acc += Complex64::from_polar(a, 2.0 * PI * p),
                    SignalKind::Real => acc.re += a * (2.0 * PI * p).cos(),
                }
            }
            samples.push(acc);
        }
        Ok(SampledSignal {
            samples,
            sample_rate: fs,
            t_start: self.t_start,
            kind,
        })
    }

    /// Samples one component only (ground truth for recovery error).
    pub fn sample_component(&self, k: usize, n: usize, kind: SignalKind) -> Result<Vec<Complex64>> {
        let fs = n as f64 / (self.t_end - self.t_start);
        let c = &self.components[k];
        Ok((0..n)
            .map(|m| {
                let t = self.t_start + m as f64 / fs;
                let (a, p) = (c.amplitude(t), c.phase(t));
                match kind {
                    SignalKind::Complex => Complex64::from_polar(a, 2.0 * PI * p),
                    SignalKind::Real => Complex64::new(a * (2.0 * PI * p).cos(), 0.0),
                }
            })
            .collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignalKind {
    Real,
    Complex,
}

/// Uniformly sampled signal.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSignal {
    pub samples: Vec<Complex64>,
    pub sample_rate: f64,
    pub t_start: f64,
    pub kind: SignalKind,
}

impl SampledSignal {
    pub fn len(&self) -> usize {
        self.samples.len()
    }
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
    /// Sample instants `t_m = t_start + m / sample_rate`.
    pub fn times(&self) -> Vec<f64> {
        (0..self.len())
            .map(|m| self.t_start + m as f64 / self.sample_rate)
            .collect()
    }
    pub fn power(&self) -> f64 {
        self.samples.iter().map(|z| z.norm_sqr()).sum::<f64>() / self.len() as f64
    }
}

/// Draws a standard normal pair from two uniforms (Box-Muller). The generator
/// is ChaCha8 seeded from `seed`, so outputs are identical across platforms.
fn normal_pair(rng: &mut ChaCha8Rng) -> (f64, f64) {
    // Map u64 to (0, 1]; avoiding exact zero keeps ln finite.
    let u1 = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
    let u2 = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
    let r = (-2.0 * (1.0 - u1).max(f64::MIN_POSITIVE).ln()).sqrt();
    let th = 2.0 * PI * u2;
    (r * th.cos(), r * th.sin())
}

/// Adds white Gaussian noise at the requested SNR (dB). The noise power is
/// `power(sig) * 10^(-snr/10)`; complex signals get circular noise with that
/// total variance. `snr_db = +inf` returns the signal unchanged.
pub fn add_noise(sig: &SampledSignal, snr_db: f64, seed: u64) -> Result<SampledSignal> {
    if sig.is_empty() {
        return Err(CwltError::Domain("cannot add noise to an empty signal".into()));
    }
    if snr_db == f64::INFINITY {
        return Ok(sig.clone());
    }
    if !snr_db.is_finite() {
        return Err(CwltError::Usage(format!("snr_db must be finite, got {snr_db}")));
    }
    let p = sig.power();
    if p == 0.0 {
        return Err(CwltError::Domain(
            "SNR undefined for an all-zero signal".into(),
        ));
    }
    let var = p * 10f64.powf(-snr_db / 10.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = sig.clone();
    match sig.kind {
        SignalKind::Real => {
            let sd = var.sqrt();
            for z in &mut out.samples {
                let (n, _) = normal_pair(&mut rng);
                z.re += sd * n;
            }
        }
        SignalKind::Complex => {
            let sd = (var / 2.0).sqrt();
            for z in &mut out.samples {
                let (nr, ni) = normal_pair(&mut rng);
                z.re += sd * nr;
                z.im += sd * ni;
            }
        }
    }
    Ok(out)
}

/// Built-in signals used by the experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Builtin {
    TwoChirp,
    ThreeMode,
}

impl std::str::FromStr for Builtin {
    type Err = CwltError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "two_chirp" | "two-chirp" => Ok(Builtin::TwoChirp),
            "three_mode" | "three-mode" => Ok(Builtin::ThreeMode),
            other => Err(CwltError::Usage(format!("unknown builtin signal '{other}'"))),
        }
    }
}

/// Returns a built-in signal specification with closed-form derivatives.
///
/// `two_chirp`: two unit-amplitude linear chirps on [0, 1],
/// `phi_1 = 12 t + 5 t^2` and `phi_2 = 34 t + 30 t^2`.
///
/// `three_mode`: a harmonic plus two sinusoidally modulated tones on [0, 10],
/// `cos(6 pi t) + (2/3) cos(9.6 pi t + 4 cos(pi t / 4))
///  + (1/2) cos(14.8 pi t + 3 cos(pi t / 4))`.
pub fn builtin(which: Builtin) -> SignalSpec {
    match which {
        Builtin::TwoChirp => SignalSpec::new(
            vec![
                Component::new(
                    |_| 1.0,
                    |t| 12.0 * t + 5.0 * t * t,
                    |t| 12.0 + 10.0 * t,
                    |_| 10.0,
                    |_| 0.0,
                ),
                Component::new(
                    |_| 1.0,
                    |t| 34.0 * t + 30.0 * t * t,
                    |t| 34.0 + 60.0 * t,
                    |_| 60.0,
                    |_| 0.0,
                ),
            ],
            0.0,
            1.0,
        )
        .expect("two_chirp constants are valid")
        .with_name("two_chirp"),
        Builtin::ThreeMode => {
            let w = PI / 4.0;
            SignalSpec::new(
                vec![
                    Component::new(|_| 1.0, |t| 3.0 * t, |_| 3.0, |_| 0.0, |_| 0.0),
                    Component::new(
                        |_| 2.0 / 3.0,
                        move |t| 4.8 * t + (2.0 / PI) * (w * t).cos(),
                        move |t| 4.8 - 0.5 * (w * t).sin(),
                        move |t| -0.5 * w * (w * t).cos(),
                        move |t| 0.5 * w * w * (w * t).sin(),
                    ),
                    Component::new(
                        |_| 0.5,
                        move |t| 7.4 * t + (1.5 / PI) * (w * t).cos(),
                        move |t| 7.4 - 0.375 * (w * t).sin(),
                        move |t| -0.375 * w * (w * t).cos(),
                        move |t| 0.375 * w * w * (w * t).sin(),
                    ),
                ],
                0.0,
                10.0,
            )
            .expect("three_mode constants are valid")
            .with_name("three_mode")
        }
    }
}

/// Sup-norm estimates of the model constants over the spec interval:
/// amplitude variation rate, chirp-rate bound, jerk bound. Used as default
/// inputs to the error-bound calculators.
pub fn estimate_model_constants(spec: &SignalSpec, n_grid: usize) -> (f64, f64, f64) {
    let (t0, t1) = spec.interval();
    let h = 1e-6 * (t1 - t0);
    let mut eps = (0.0f64, 0.0f64, 0.0f64);
    for i in 0..n_grid {
        let t = t0 + (t1 - t0) * (i as f64 + 0.5) / n_grid as f64;
        for c in spec.components() {
            let a = c.amplitude(t);
            let da = (c.amplitude(t + h) - c.amplitude(t - h)) / (2.0 * h);
            if a > 0.0 {
                eps.0 = eps.0.max((da / a).abs());
            }
            eps.1 = eps.1.max(c.chirp_rate(t).abs());
            eps.2 = eps.2.max(c.jerk(t).abs());
        }
    }
    eps
}
