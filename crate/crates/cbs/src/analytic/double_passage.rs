//! Closed-form CBS profiles of the double-passage geometry (thin diffuser
//! at distance `L` in front of a mirror).
//!
//! Both profiles factor into a narrow interference peak and a broad
//! envelope set by the diffuser scattering angle `θ₀`:
//!
//! ```text
//! Γ_ba ∝ {1 + exp[-(2kLθ₀)² (θ_a-θ_b)²/2]} · exp[-(θ_a+θ_b)²/(4θ₀²)]
//! R_ba ∝ {1 + exp[-(kLθ₀)²  (θ_a+θ_b)²/2]} · exp[-(θ_a-θ_b)²/(2θ₀²)]
//! ```
//!
//! so the two-photon peak is Gaussian with width parameter `(2kLθ₀)⁻¹`,
//! exactly half the classical `(kLθ₀)⁻¹`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DoublePassageError {
    #[error("parameter {name} must be positive and finite, got {value}")]
    NotPositive { name: &'static str, value: f64 },
    #[error("paraxial model assumes theta0 << 1 rad, got {0}")]
    NotParaxial(f64),
}

/// Geometry and detection parameters of the diffuser–mirror experiment.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DoublePassageParams {
    /// Wavenumber `k = 2π/λ`.
    pub k: f64,
    /// Diffuser–mirror spacing.
    pub spacing: f64,
    /// Diffuser scattering angle (1/e half-width of the single-pass
    /// far-field intensity), radians.
    pub theta0: f64,
    /// Angular resolution of the static two-photon detector.
    pub delta_a: f64,
    /// Angular resolution of the scanning detector.
    pub delta_b: f64,
    /// Angular divergence of the heralded illumination.
    pub delta_h: f64,
}

fn positive(name: &'static str, value: f64) -> Result<f64, DoublePassageError> {
    if !(value.is_finite() && value > 0.0) {
        return Err(DoublePassageError::NotPositive { name, value });
    }
    Ok(value)
}

impl DoublePassageParams {
    /// Geometry with ideal (pointlike) detectors.
    pub fn ideal(k: f64, spacing: f64, theta0: f64) -> Result<Self, DoublePassageError> {
        positive("k", k)?;
        positive("spacing", spacing)?;
        positive("theta0", theta0)?;
        if theta0 >= 0.3 {
            return Err(DoublePassageError::NotParaxial(theta0));
        }
        Ok(Self { k, spacing, theta0, delta_a: 0.0, delta_b: 0.0, delta_h: 0.0 })
    }

    /// Detector blur from fiber radius `sigma` behind focal lengths
    /// `f_pair` (both coincidence detectors) and `f_herald` (heralding arm).
    pub fn with_fibers(
        k: f64,
        spacing: f64,
        theta0: f64,
        sigma: f64,
        f_pair: f64,
        f_herald: f64,
    ) -> Result<Self, DoublePassageError> {
        let mut p = Self::ideal(k, spacing, theta0)?;
        positive("sigma", sigma)?;
        positive("f_pair", f_pair)?;
        positive("f_herald", f_herald)?;
        p.delta_a = sigma / f_pair;
        p.delta_b = sigma / f_pair;
        p.delta_h = sigma / f_herald;
        Ok(p)
    }

    /// Dimensionless spacing parameter `kLθ₀²` controlling how cleanly the
    /// interference peak separates from the envelope.
    pub fn klt2(&self) -> f64 {
        self.k * self.spacing * self.theta0 * self.theta0
    }
}

/// Two-photon coincidence profile (unnormalized), peak in `θ_a - θ_b`.
pub fn gamma_double_passage(theta_a: f64, theta_b: f64, p: &DoublePassageParams) -> f64 {
    let peak_scale = 2.0 * p.k * p.spacing * p.theta0;
    let diff = theta_a - theta_b;
    let sum = theta_a + theta_b;
    (1.0 + (-0.5 * (peak_scale * diff).powi(2)).exp())
        * (-(sum * sum) / (4.0 * p.theta0 * p.theta0)).exp()
}

/// Mean reflection coefficient profile (unnormalized), peak in `θ_a + θ_b`.
pub fn r_double_passage(theta_a: f64, theta_b: f64, p: &DoublePassageParams) -> f64 {
    let peak_scale = p.k * p.spacing * p.theta0;
    let diff = theta_a - theta_b;
    let sum = theta_a + theta_b;
    (1.0 + (-0.5 * (peak_scale * sum).powi(2)).exp())
        * (-(diff * diff) / (2.0 * p.theta0 * p.theta0)).exp()
}

/// Exact backscattering-point value `Γ(0,0)` relative to half the
/// bi-diffuson + bi-cooperon baseline, as a function of `x = kLθ₀²`:
/// `2[1 + (1 + x²/2)^{-1/2} + (1 + x²/4)^{-1/2}]`.
///
/// Decreases monotonically from 6 at `x = 0` (all double-passage pairings
/// coherent) to 2 for `x → ∞` (only the bi-diffuson and bi-cooperon left).
pub fn gamma_zero_angle(x: f64) -> f64 {
    assert!(x >= 0.0, "kLθ₀² must be nonnegative");
    2.0 * (1.0 + 1.0 / (1.0 + x * x / 2.0).sqrt() + 1.0 / (1.0 + x * x / 4.0).sqrt())
}

/// Measured two-photon CBS width: detector blur in quadrature with the
/// intrinsic `(2kLθ₀)⁻¹`.
pub fn convolved_width_2p(p: &DoublePassageParams) -> f64 {
    let intrinsic = 1.0 / (2.0 * p.k * p.spacing * p.theta0);
    (p.delta_a * p.delta_a + p.delta_b * p.delta_b + intrinsic * intrinsic).sqrt()
}

/// Measured one-photon CBS width: heralding divergence and detector blur in
/// quadrature with the intrinsic `(kLθ₀)⁻¹`.
pub fn convolved_width_1p(p: &DoublePassageParams) -> f64 {
    let intrinsic = 1.0 / (p.k * p.spacing * p.theta0);
    (p.delta_h * p.delta_h + p.delta_b * p.delta_b + intrinsic * intrinsic).sqrt()
}
