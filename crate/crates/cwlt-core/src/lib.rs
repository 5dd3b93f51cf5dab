//! Separation of multicomponent AM-FM signals with an adaptive continuous
//! wavelet-like transform.
//!
//! The transform correlates the signal with a Gaussian window of
//! time-varying width `sigma(b)` modulated at frequency `mu`, so that
//! `xi = mu / a` acts as the frequency variable. Components are located as
//! per-time ridges of the transform magnitude and read out directly at the
//! ridge, either as-is (sinusoidal local model) or multiplied by the inverse
//! of the chirp kernel peak (linear-chirp local model). The `bounds` module
//! evaluates the closed-form error bounds of both models, and `experiment`
//! reproduces the desk-scale separation studies on the built-in signals.
//!
//! ```
//! use cwlt_core::engine::{transform, FrequencyGrid, DEFAULT_T_HALF};
//! use cwlt_core::recover::recover_sinusoidal;
//! use cwlt_core::ridge::{extract_ridges, RidgeModel};
//! use cwlt_core::signal::{builtin, Builtin, SignalKind};
//! use cwlt_core::sigma::sigma_chirp;
//! use cwlt_core::window::WindowSpec;
//!
//! let spec = builtin(Builtin::TwoChirp);
//! let sig = spec.sample(256, SignalKind::Real)?;
//! let window = WindowSpec::default();
//! let sigma = sigma_chirp(&spec, &window, &sig.times(), false)?;
//! let grid = FrequencyGrid::linear(4.0, 108.0, 1024)?;
//! let tf = transform(&sig, &grid, &sigma, &window, DEFAULT_T_HALF)?;
//! let ridges = extract_ridges(&tf, 2, 0.2, RidgeModel::Sinusoidal, None)?;
//! let first = recover_sinusoidal(&tf, &ridges, 0, SignalKind::Real)?;
//! assert_eq!(first.values.len(), sig.len());
//! # Ok::<(), cwlt_core::CwltError>(())
//! ```

pub mod bounds;
pub mod engine;
pub mod error;
pub mod experiment;
pub mod io;
pub mod recover;
pub mod ridge;
pub mod signal;
pub mod sigma;
pub mod window;

pub use error::{CwltError, Result};
