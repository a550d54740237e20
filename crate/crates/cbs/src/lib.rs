//! Coherent backscattering (CBS) of classical light and entangled photon pairs.
//!
//! The crate models the angle-resolved statistics of light reflected from
//! dynamic disordered media, for both the mean reflection coefficient
//! `R_ba` (one-photon CBS) and the two-photon coincidence correlator
//! `Γ_ba` of a momentum-anticorrelated EPR pair (two-photon CBS), through
//! three independent routes:
//!
//! * [`phasescreen`] — Monte Carlo of the double-passage geometry (random
//!   phase screen + mirror), where the reflection matrix factorizes as
//!   `r = V H V` with `V` a correlated Gaussian screen and `H` the Fresnel
//!   propagator.
//! * [`rmt`] — circular-unitary-ensemble sampling for waveguide geometries,
//!   with asymptotic Weingarten-weight predictions for the enhancement.
//! * [`fullwave`] — exact 2D scalar-Helmholtz reflection matrices of
//!   disordered cylinder slabs via a slice-recursive Green's function.
//!
//! [`analytic`] provides the closed-form lineshapes the Monte Carlo runs are
//! compared against, and [`fisher`] the Fisher-information / Cramér–Rao
//! machinery for transport-mean-free-path estimation under speckle and
//! Poisson noise.
//!
//! All ensemble averages run through [`ensemble`], which merges per-worker
//! partial sums in a fixed order so results are bitwise independent of the
//! worker count.

pub mod analytic;
pub mod correlator;
pub mod ensemble;
pub mod fisher;
pub mod fullwave;
pub mod modes;
pub mod phasescreen;
pub mod reflection;
pub mod rmt;
pub mod seed;

pub use correlator::{epr_gamma, epr_gamma_oracle};
pub use ensemble::{CbsProfile, EnsembleAccumulator, ProfileBin};
pub use modes::{ModeBasis, Negation};
pub use reflection::ReflectionMatrix;
pub use seed::SeedPlan;
