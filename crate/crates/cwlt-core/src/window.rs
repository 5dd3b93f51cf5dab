//! Gaussian window mathematics.
//!
//! Everything here is about the unit Gaussian window `g(t) = e^{-t^2/2}/sqrt(2 pi)`:
//! its Fourier transform, the essential-support radius for a threshold
//! `tau0`, the chirp-modulated kernel obtained by transforming
//! `e^{i pi lambda t^2} g(t)`, and the absolute moments used by the error
//! bounds. Only the Gaussian ships; the monotone-decay assumptions it
//! satisfies are checked by tests so another window could be added behind the
//! same surface.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{CwltError, Result};

/// Window configuration: modulation frequency `mu`, essential-support
/// threshold `tau0`, and the derived support radius `alpha`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct WindowSpec {
    pub mu: f64,
    pub tau0: f64,
    pub alpha: f64,
}

impl WindowSpec {
    /// Builds a window from `mu > 0` and `tau0 in (0, 1)`; `alpha` is derived.
    pub fn new(mu: f64, tau0: f64) -> Result<Self> {
        if !(mu > 0.0) || !mu.is_finite() {
            return Err(CwltError::Usage(format!("mu must be positive, got {mu}")));
        }
        let alpha = essential_support_radius(tau0)?;
        Ok(WindowSpec { mu, tau0, alpha })
    }

}

/// Default window: `mu = 1`, `tau0 = 1/8`.
impl Default for WindowSpec {
    fn default() -> Self {
        WindowSpec::new(1.0, 0.125).expect("constants are valid")
    }
}

/// Unit Gaussian window `g(t) = e^{-t^2/2} / sqrt(2 pi)`.
#[inline]
pub fn gaussian(t: f64) -> f64 {
    (-0.5 * t * t).exp() / (2.0 * PI).sqrt()
}

/// Fourier transform of the window: `e^{-2 pi^2 xi^2}`.
#[inline]
pub fn gaussian_ft(xi: f64) -> f64 {
    (-2.0 * PI * PI * xi * xi).exp()
}

/// Radius `alpha` outside which `|gaussian_ft| <= tau0`:
/// `alpha = sqrt(2 ln(1/tau0)) / (2 pi)`.
pub fn essential_support_radius(tau0: f64) -> Result<f64> {
    if !(tau0 > 0.0 && tau0 < 1.0) {
        return Err(CwltError::Usage(format!(
            "tau0 must lie in (0, 1), got {tau0}"
        )));
    }
    Ok((2.0 * (1.0 / tau0).ln()).sqrt() / (2.0 * PI))
}

/// Inverse of `gaussian_ft` on `(0, 1)`: returns `xi >= 0` with
/// `gaussian_ft(xi) = y`.
pub fn gaussian_ft_inverse(y: f64) -> Result<f64> {
    if !(y > 0.0 && y < 1.0) {
        return Err(CwltError::Domain(format!(
            "gaussian_ft_inverse needs y in (0, 1), got {y}"
        )));
    }
    Ok((-y.ln()).sqrt() / (PI * 2.0_f64.sqrt()))
}

/// Fourier transform of `e^{i pi lambda t^2} g(t)` evaluated at `xi`, in
/// closed form:
///
/// `(1 - i 2 pi lambda)^{-1/2} exp(-2 pi^2 xi^2 (1 + i 2 pi lambda) / (1 + (2 pi lambda)^2))`
///
/// The square root is the principal branch; the radicand has real part 1, so
/// the kernel is continuous in `lambda`.
pub fn chirp_kernel(xi: f64, lambda: f64) -> Complex64 {
    let w = 2.0 * PI * lambda;
    let denom = 1.0 + w * w;
    let root = Complex64::new(1.0, -w).sqrt();
    let arg = Complex64::new(1.0, w) * (-2.0 * PI * PI * xi * xi / denom);
    arg.exp() / root
}

/// Magnitude of [`chirp_kernel`]:
/// `(1 + (2 pi lambda)^2)^{-1/4} exp(-2 pi^2 xi^2 / (1 + (2 pi lambda)^2))`.
#[inline]
pub fn chirp_kernel_mag(xi: f64, lambda: f64) -> f64 {
    let w = 2.0 * PI * lambda;
    let denom = 1.0 + w * w;
    denom.powf(-0.25) * (-2.0 * PI * PI * xi * xi / denom).exp()
}

/// Peak magnitude `chirp_kernel_mag(0, lambda) = (1 + (2 pi lambda)^2)^{-1/4}`.
#[inline]
pub fn chirp_kernel_mag_at_zero(lambda: f64) -> f64 {
    let w = 2.0 * PI * lambda;
    (1.0 + w * w).powf(-0.25)
}

/// Inverse of `xi -> chirp_kernel_mag(xi, lambda)` for `xi >= 0`:
/// given `0 < y < peak`, returns the `xi` with that magnitude.
pub fn chirp_kernel_mag_inverse(y: f64, lambda: f64) -> Result<f64> {
    let peak = chirp_kernel_mag_at_zero(lambda);
    if !(y > 0.0 && y < peak) {
        return Err(CwltError::Domain(format!(
            "chirp_kernel_mag_inverse needs y in (0, {peak}), got {y}"
        )));
    }
    // peak = (1+w^2)^{-1/4} so 1/(pi sqrt 2 peak^2) * sqrt(-ln(y/peak)).
    Ok((-(y / peak).ln()).sqrt() / (PI * 2.0_f64.sqrt() * peak * peak))
}

/// Absolute moment `I_n = integral |t^n g(t)| dt` for `n in {1, 2, 3}`.
///
/// Closed forms for the Gaussian: `I_1 = sqrt(2/pi)`, `I_2 = 1`,
/// `I_3 = 2 sqrt(2/pi)`.
pub fn abs_moment(n: u32) -> Result<f64> {
    match n {
        1 => Ok((2.0 / PI).sqrt()),
        2 => Ok(1.0),
        3 => Ok(2.0 * (2.0 / PI).sqrt()),
        _ => Err(CwltError::Usage(format!(
            "abs_moment supports n in {{1, 2, 3}}, got {n}"
        ))),
    }
}
