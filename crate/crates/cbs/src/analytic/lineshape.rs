//! Diffusive CBS lineshape F(q) and the cone profiles built from it.
//!
//! `F(q)` is the normalized transverse Fourier transform of the diffuse
//! reflected intensity of a semi-infinite nonabsorbing medium,
//!
//! ```text
//! F(q) ∝ exp[ -(2/π) ∫_0^{π/2} dβ ln(1 - f(tan²β + q²ℓ²)) ]
//! ```
//!
//! with `f(x) = arctan(√x)/√x` in 3D and `f(x) = 1/√(x+1)` in 2D, divided by
//! its `q = 0` value. Near the origin `F(q) ≃ 1 - 2qℓ`, which fixes the cone
//! width; the classical cone is `1 + F` and the two-photon cone `1 + F²`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::quad::{integrate, QuadError};

/// Spatial dimensionality of the diffusive medium.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Dim {
    Two,
    Three,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineshapeParams {
    /// Transport mean free path (length).
    pub ell: f64,
    pub dim: Dim,
    /// Wavenumber (rad/length).
    pub k: f64,
}

#[derive(Debug, Error)]
pub enum LineshapeError {
    #[error("transport mean free path must be positive, got {0}")]
    BadEll(f64),
    #[error("weak-scattering regime requires k*ell > 1, got {0}")]
    NotWeakScattering(f64),
    #[error("momentum must be nonnegative, got {0}")]
    NegativeMomentum(f64),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
}

impl LineshapeParams {
    pub fn new(ell: f64, dim: Dim, k: f64) -> Result<Self, LineshapeError> {
        if !(ell.is_finite() && ell > 0.0) {
            return Err(LineshapeError::BadEll(ell));
        }
        if !(k * ell > 1.0) {
            return Err(LineshapeError::NotWeakScattering(k * ell));
        }
        Ok(Self { ell, dim, k })
    }
}

fn f_of_x(x: f64, dim: Dim) -> f64 {
    match dim {
        Dim::Three => {
            if x < 1e-8 {
                // arctan(√x)/√x = 1 - x/3 + x²/5 - …
                1.0 - x / 3.0 + x * x / 5.0
            } else {
                let s = x.sqrt();
                s.atan() / s
            }
        }
        Dim::Two => 1.0 / (x + 1.0).sqrt(),
    }
}

/// `∫_0^{π/2} dβ ln(1 - f(tan²β + a))` via the substitution `u = tan β`,
/// folded onto `u ∈ (0, 1]`.
fn log_integral(a: f64, dim: Dim) -> Result<f64, QuadError> {
    let g = |u: f64| (1.0 - f_of_x(u * u + a, dim)).ln();
    integrate(
        |u| {
            if u == 0.0 {
                // limit u→0 of g(1/u)/(1+u²) is 0; g(u) term handled by the
                // adaptive refinement (integrable log singularity at a = 0)
                return if a > 0.0 { g(0.0) } else { 0.0 };
            }
            (g(u) + g(1.0 / u)) / (1.0 + u * u)
        },
        0.0,
        1.0,
        1e-10,
    )
}

/// Diffusive lineshape with the `q = 0` normalization precomputed.
#[derive(Clone, Debug)]
pub struct DiffusiveLineshape {
    params: LineshapeParams,
    log_at_zero: f64,
}

impl DiffusiveLineshape {
    pub fn new(params: LineshapeParams) -> Result<Self, LineshapeError> {
        let log_at_zero = log_integral(0.0, params.dim)?;
        Ok(Self { params, log_at_zero })
    }

    pub fn params(&self) -> &LineshapeParams {
        &self.params
    }

    /// Normalized `F(q)`, with `F(0) = 1`.
    pub fn eval(&self, q: f64) -> Result<f64, LineshapeError> {
        if q < 0.0 {
            return Err(LineshapeError::NegativeMomentum(q));
        }
        if q == 0.0 {
            return Ok(1.0);
        }
        let a = (q * self.params.ell).powi(2);
        let log_at_q = log_integral(a, self.params.dim)?;
        Ok((-(2.0 / std::f64::consts::PI) * (log_at_q - self.log_at_zero)).exp())
    }

    /// Classical cone `1 + F(2k sin(θ/2))`.
    pub fn r_diffusive(&self, theta: f64) -> Result<f64, LineshapeError> {
        let q = 2.0 * self.params.k * (theta.abs() / 2.0).sin();
        Ok(1.0 + self.eval(q)?)
    }

    /// Two-photon cone `1 + F(2k sin(θ/2))²`.
    pub fn gamma_diffusive(&self, theta: f64) -> Result<f64, LineshapeError> {
        let q = 2.0 * self.params.k * (theta.abs() / 2.0).sin();
        let f = self.eval(q)?;
        Ok(1.0 + f * f)
    }
}

/// Normalized `F(q)`; convenience wrapper that recomputes the normalization
/// on every call. Use [`DiffusiveLineshape`] when evaluating many points.
pub fn f_lineshape(q: f64, params: &LineshapeParams) -> Result<f64, LineshapeError> {
    DiffusiveLineshape::new(*params)?.eval(q)
}

/// Small-`q` closed form `1/(1 + qℓ)²`.
pub fn f_smallq(q: f64, ell: f64) -> f64 {
    1.0 / (1.0 + q * ell).powi(2)
}

/// `1 + F(2k sin(θ/2))` for a fresh lineshape.
pub fn r_diffusive(theta: f64, params: &LineshapeParams) -> Result<f64, LineshapeError> {
    DiffusiveLineshape::new(*params)?.r_diffusive(theta)
}

/// `1 + F(2k sin(θ/2))²` for a fresh lineshape.
pub fn gamma_diffusive(theta: f64, params: &LineshapeParams) -> Result<f64, LineshapeError> {
    DiffusiveLineshape::new(*params)?.gamma_diffusive(theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params(dim: Dim) -> LineshapeParams {
        LineshapeParams::new(9.5, dim, 2.0 * std::f64::consts::PI).unwrap()
    }

    #[test]
    fn normalized_at_zero() {
        for dim in [Dim::Two, Dim::Three] {
            let f = DiffusiveLineshape::new(params(dim)).unwrap();
            assert_eq!(f.eval(0.0).unwrap(), 1.0);
        }
    }

    #[test]
    fn small_q_slope_is_minus_two_ell() {
        let p = params(Dim::Three);
        let f = DiffusiveLineshape::new(p).unwrap();
        for ql in [0.01, 0.005] {
            let q = ql / p.ell;
            let slope = (1.0 - f.eval(q).unwrap()) / ql;
            assert!((slope - 2.0).abs() < 0.1, "slope {slope} at ql={ql}");
        }
    }

    #[test]
    fn smallq_form_values() {
        assert_eq!(f_smallq(0.0, 9.5), 1.0);
        assert_relative_eq!(f_smallq(1.0 / 9.5, 9.5), 0.25);
    }

    #[test]
    fn smallq_matches_quadrature_slope_regime() {
        let p = params(Dim::Three);
        let f = DiffusiveLineshape::new(p).unwrap();
        let ql = 0.004;
        let quadrature = f.eval(ql / p.ell).unwrap();
        let closed = f_smallq(ql / p.ell, p.ell);
        // both are 1 - 2qℓ + O((qℓ)²)
        assert!((quadrature - closed).abs() < 5.0 * ql * ql);
    }

    #[test]
    fn monotone_decreasing_within_unit_interval() {
        for dim in [Dim::Two, Dim::Three] {
            let p = params(dim);
            let f = DiffusiveLineshape::new(p).unwrap();
            let mut prev = 1.0;
            for i in 1..=40 {
                let q = i as f64 * 0.25 / p.ell;
                let v = f.eval(q).unwrap();
                assert!(v > 0.0 && v <= 1.0, "F out of range: {v}");
                assert!(v < prev + 1e-12, "not decreasing at qℓ={}", q * p.ell);
                prev = v;
            }
        }
    }

    #[test]
    fn cone_identity_gamma_minus_one_is_r_minus_one_squared() {
        let p = params(Dim::Two);
        let f = DiffusiveLineshape::new(p).unwrap();
        for theta in [0.0, 0.003, 0.01, 0.05, 0.3] {
            let r = f.r_diffusive(theta).unwrap();
            let g = f.gamma_diffusive(theta).unwrap();
            assert_relative_eq!(g - 1.0, (r - 1.0) * (r - 1.0), max_relative = 1e-12);
        }
    }

    #[test]
    fn cone_limits() {
        let p = params(Dim::Three);
        let f = DiffusiveLineshape::new(p).unwrap();
        assert_relative_eq!(f.r_diffusive(0.0).unwrap(), 2.0);
        assert_relative_eq!(f.gamma_diffusive(0.0).unwrap(), 2.0);
        // far wings approach the (finite) background
        let far = f.r_diffusive(1.2).unwrap();
        assert!(far < 1.45, "background not reached: {far}");
    }

    #[test]
    fn rejects_strong_scattering() {
        assert!(matches!(
            LineshapeParams::new(0.1, Dim::Three, 2.0),
            Err(LineshapeError::NotWeakScattering(_))
        ));
    }
}
