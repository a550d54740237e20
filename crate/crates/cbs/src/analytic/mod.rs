//! Closed-form CBS lineshapes, double-passage formulas, and profile fits.

pub mod double_passage;
pub mod fit;
pub mod gaussian_sum;
pub mod lineshape;
pub mod quad;

pub use double_passage::{
    convolved_width_1p, convolved_width_2p, gamma_double_passage, gamma_zero_angle,
    r_double_passage, DoublePassageParams,
};
pub use fit::{fit_cbs_profile, fwhm_above_baseline, CbsModel, FitError, FitResult};
pub use gaussian_sum::{gamma_gaussian_full, gamma_gaussian_leading};
pub use lineshape::{
    f_lineshape, f_smallq, gamma_diffusive, r_diffusive, Dim, DiffusiveLineshape, LineshapeParams,
};
