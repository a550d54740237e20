//! Four-parameter fits of measured CBS scans and FWHM extraction.
//!
//! A fixed-detector scan of either double-passage profile is a narrow peak
//! Gaussian riding on a broad envelope Gaussian,
//!
//! ```text
//! y(θ) = A · [1 + exp(-(θ-c_p)²/(2 w_p²))] · exp(-(θ-c_b)²/(2 w_b²))
//! ```
//!
//! with the peak and background widths, the static-detector offset `c_p`,
//! and a global angular shift `c_b` of the background as the four physical
//! parameters (`A` is a nuisance amplitude). Fitting is plain
//! Levenberg–Marquardt with a numerical Jacobian.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ensemble::CbsProfile;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CbsModel {
    OnePhoton,
    TwoPhoton,
}

#[derive(Debug, Error)]
pub enum FitError {
    #[error("profile has {0} usable bins, need at least 8 spanning peak and background")]
    TooFewBins(usize),
    #[error("profile shows no peak above the background (max/background = {0:.3})")]
    NoPeak(f64),
    #[error("fit did not converge after {iterations} iterations (cost {cost:.3e}); best iterate {best:?}")]
    NoConvergence { iterations: usize, cost: f64, best: Box<FitResult> },
    #[error("no half-maximum crossing on the {0} side of the peak")]
    NoHalfCrossing(&'static str),
}

/// Fitted double-passage scan parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    /// Gaussian σ of the broad background envelope.
    pub background_width: f64,
    /// Gaussian σ of the interference peak; the measured CBS width.
    pub peak_width: f64,
    /// Peak center: the apparent position of the static detector.
    pub detector_offset: f64,
    /// Background center: global angular shift of the envelope.
    pub global_shift: f64,
    /// Nuisance amplitude (background level at the envelope center).
    pub amplitude: f64,
    /// Covariance estimate of (amplitude, w_b, w_p, c_p, c_b).
    pub covariance: [[f64; 5]; 5],
    /// Root-mean-square weighted residual.
    pub residual_norm: f64,
}

fn model(theta: f64, p: &[f64; 5]) -> f64 {
    let (a, wb, wp, cp, cb) = (p[0], p[1].abs(), p[2].abs(), p[3], p[4]);
    let peak = (-(theta - cp).powi(2) / (2.0 * wp * wp)).exp();
    let env = (-(theta - cb).powi(2) / (2.0 * wb * wb)).exp();
    a * (1.0 + peak) * env
}

fn solve5(mut m: [[f64; 5]; 5], mut rhs: [f64; 5]) -> Option<[f64; 5]> {
    for col in 0..5 {
        let pivot = (col..5).max_by(|&i, &j| m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap())?;
        if m[pivot][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in (col + 1)..5 {
            let f = m[row][col] / m[col][col];
            for k in col..5 {
                m[row][k] -= f * m[col][k];
            }
            rhs[row] -= f * rhs[col];
        }
    }
    let mut x = [0.0; 5];
    for col in (0..5).rev() {
        let mut s = rhs[col];
        for k in (col + 1)..5 {
            s -= m[col][k] * x[k];
        }
        x[col] = s / m[col][col];
    }
    Some(x)
}

fn invert5(m: [[f64; 5]; 5]) -> Option<[[f64; 5]; 5]> {
    let mut inv = [[0.0; 5]; 5];
    for col in 0..5 {
        let mut e = [0.0; 5];
        e[col] = 1.0;
        let x = solve5(m, e)?;
        for row in 0..5 {
            inv[row][col] = x[row];
        }
    }
    Some(inv)
}

struct WeightedData {
    theta: Vec<f64>,
    y: Vec<f64>,
    w: Vec<f64>,
}

fn residuals(d: &WeightedData, p: &[f64; 5], out: &mut [f64]) {
    for i in 0..d.theta.len() {
        out[i] = (model(d.theta[i], p) - d.y[i]) * d.w[i];
    }
}

fn cost(d: &WeightedData, p: &[f64; 5]) -> f64 {
    let mut c = 0.0;
    for i in 0..d.theta.len() {
        let r = (model(d.theta[i], p) - d.y[i]) * d.w[i];
        c += r * r;
    }
    c
}

/// Nonlinear least squares of the double-passage scan model to a profile.
pub fn fit_cbs_profile(profile: &CbsProfile, _model: CbsModel) -> Result<FitResult, FitError> {
    let mut theta = Vec::new();
    let mut y = Vec::new();
    let mut w = Vec::new();
    for bin in &profile.bins {
        if !bin.mean.is_finite() {
            continue;
        }
        theta.push(bin.label);
        y.push(bin.mean);
        let sigma = if bin.stderr.is_finite() && bin.stderr > 0.0 { bin.stderr } else { 1.0 };
        w.push(1.0 / sigma);
    }
    let n = theta.len();
    if n < 8 {
        return Err(FitError::TooFewBins(n));
    }
    // normalize weights so unweighted and weighted fits have comparable cost
    let wmax = w.iter().cloned().fold(0.0, f64::max);
    for wi in &mut w {
        *wi /= wmax;
    }

    // peak detection: the profile must rise above its wings
    let mut sorted = y.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let lo = sorted[n / 4].max(1e-300);
    let ymax = sorted[n - 1];
    if ymax < 1.3 * lo {
        return Err(FitError::NoPeak(ymax / lo));
    }

    // moment-based initialization
    let mass: f64 = y.iter().sum();
    let centroid = theta.iter().zip(&y).map(|(t, v)| t * v).sum::<f64>() / mass;
    let var = theta
        .iter()
        .zip(&y)
        .map(|(t, v)| (t - centroid).powi(2) * v)
        .sum::<f64>()
        / mass;
    let wb0 = var.sqrt().max((theta[1] - theta[0]).abs());
    let imax = y
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    let mut p = [ymax / 2.0, wb0, wb0 / 6.0, theta[imax], centroid];

    let data = WeightedData { theta, y, w };
    let mut lambda = 1e-3;
    let mut current = cost(&data, &p);
    let mut res = vec![0.0; n];
    let mut converged = false;
    let mut iterations = 0;
    for iter in 0..300 {
        iterations = iter + 1;
        // numerical Jacobian (central differences)
        let mut jac = vec![[0.0; 5]; n];
        for k in 0..5 {
            let scale = p[k].abs().max(1e-8);
            let h = 1e-6 * scale;
            let mut pp = p;
            pp[k] += h;
            let mut pm = p;
            pm[k] -= h;
            for i in 0..n {
                let fp = (model(data.theta[i], &pp) - data.y[i]) * data.w[i];
                let fm = (model(data.theta[i], &pm) - data.y[i]) * data.w[i];
                jac[i][k] = (fp - fm) / (2.0 * h);
            }
        }
        residuals(&data, &p, &mut res);
        let mut jtj = [[0.0; 5]; 5];
        let mut jtr = [0.0; 5];
        for i in 0..n {
            for a in 0..5 {
                jtr[a] += jac[i][a] * res[i];
                for b in 0..5 {
                    jtj[a][b] += jac[i][a] * jac[i][b];
                }
            }
        }
        let mut improved = false;
        for _ in 0..24 {
            let mut damped = jtj;
            for a in 0..5 {
                damped[a][a] += lambda * jtj[a][a].max(1e-300);
            }
            let Some(step) = solve5(damped, jtr) else {
                lambda *= 10.0;
                continue;
            };
            let mut trial = p;
            for a in 0..5 {
                trial[a] -= step[a];
            }
            let trial_cost = cost(&data, &trial);
            if trial_cost < current {
                let rel = (current - trial_cost) / current.max(1e-300);
                p = trial;
                current = trial_cost;
                lambda = (lambda * 0.3).max(1e-14);
                improved = true;
                if rel < 1e-14 {
                    converged = true;
                }
                break;
            }
            lambda *= 10.0;
        }
        if !improved {
            converged = true; // stuck at a (local) optimum
        }
        if converged {
            break;
        }
    }

    let result = |p: &[f64; 5], cost_val: f64| {
        // covariance ≈ s² (JᵀJ)⁻¹ with s² the reduced chi-square
        let mut jtj = [[0.0; 5]; 5];
        let mut jac = vec![[0.0; 5]; n];
        for k in 0..5 {
            let h = 1e-6 * p[k].abs().max(1e-8);
            let mut pp = *p;
            pp[k] += h;
            let mut pm = *p;
            pm[k] -= h;
            for i in 0..n {
                let fp = model(data.theta[i], &pp) * data.w[i];
                let fm = model(data.theta[i], &pm) * data.w[i];
                jac[i][k] = (fp - fm) / (2.0 * h);
            }
        }
        for i in 0..n {
            for a in 0..5 {
                for b in 0..5 {
                    jtj[a][b] += jac[i][a] * jac[i][b];
                }
            }
        }
        let s2 = cost_val / (n.saturating_sub(5).max(1)) as f64;
        let cov = invert5(jtj)
            .map(|inv| {
                let mut c = inv;
                for row in &mut c {
                    for v in row.iter_mut() {
                        *v *= s2;
                    }
                }
                c
            })
            .unwrap_or([[f64::NAN; 5]; 5]);
        FitResult {
            background_width: p[1].abs(),
            peak_width: p[2].abs(),
            detector_offset: p[3],
            global_shift: p[4],
            amplitude: p[0],
            covariance: cov,
            residual_norm: (cost_val / n as f64).sqrt(),
        }
    };

    if !converged {
        return Err(FitError::NoConvergence {
            iterations,
            cost: current,
            best: Box::new(result(&p, current)),
        });
    }
    Ok(result(&p, current))
}

/// FWHM of a sampled peak above a known baseline, with the two half-maximum
/// crossings located by local quadratic interpolation (3 points each).
pub fn fwhm_above_baseline(xs: &[f64], ys: &[f64], baseline: f64) -> Result<f64, FitError> {
    assert_eq!(xs.len(), ys.len());
    if xs.len() < 5 {
        return Err(FitError::TooFewBins(xs.len()));
    }
    let imax = ys
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    let level = baseline + 0.5 * (ys[imax] - baseline);

    let crossing = |i: usize, j: usize| -> Option<f64> {
        // quadratic through (i-1, i, i+1) around the bracketing bin i,
        // evaluated for the root between xs[i] and xs[j]
        let c = i.clamp(1, xs.len() - 2);
        let (x0, x1, x2) = (xs[c - 1], xs[c], xs[c + 1]);
        let (y0, y1, y2) = (ys[c - 1] - level, ys[c] - level, ys[c + 1] - level);
        // Newton form coefficients
        let d1 = (y1 - y0) / (x1 - x0);
        let d2 = ((y2 - y1) / (x2 - x1) - d1) / (x2 - x0);
        // y(x) = y0 + d1 (x-x0) + d2 (x-x0)(x-x1); solve in [min,max] of i,j
        let lo = xs[i].min(xs[j]);
        let hi = xs[i].max(xs[j]);
        let eval = |x: f64| y0 + d1 * (x - x0) + d2 * (x - x0) * (x - x1);
        let (mut a, mut b) = (lo, hi);
        let (fa, fb) = (eval(a), eval(b));
        if fa == 0.0 {
            return Some(a);
        }
        if fa * fb > 0.0 {
            // fall back to linear interpolation between the raw samples
            let (ya, yb) = (ys[i] - level, ys[j] - level);
            if ya * yb > 0.0 {
                return None;
            }
            return Some(xs[i] + (xs[j] - xs[i]) * ya / (ya - yb));
        }
        for _ in 0..80 {
            let m = 0.5 * (a + b);
            if eval(a) * eval(m) <= 0.0 {
                b = m;
            } else {
                a = m;
            }
        }
        Some(0.5 * (a + b))
    };

    let mut left = None;
    for i in (1..=imax).rev() {
        if (ys[i] - level) > 0.0 && (ys[i - 1] - level) <= 0.0 {
            left = crossing(i - 1, i);
            break;
        }
    }
    let mut right = None;
    for i in imax..xs.len() - 1 {
        if (ys[i] - level) > 0.0 && (ys[i + 1] - level) <= 0.0 {
            right = crossing(i, i + 1);
            break;
        }
    }
    match (left, right) {
        (Some(l), Some(r)) => Ok(r - l),
        (None, _) => Err(FitError::NoHalfCrossing("left")),
        (_, None) => Err(FitError::NoHalfCrossing("right")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::double_passage::{gamma_double_passage, DoublePassageParams};
    use crate::ensemble::{CbsProfile, ProfileBin};
    use approx::assert_relative_eq;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn synthetic(p: &DoublePassageParams, noise: f64, seed: u64) -> CbsProfile {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 241;
        let span = 4.0 * p.theta0;
        let bins = (0..n)
            .map(|i| {
                let theta = -span + 2.0 * span * i as f64 / (n - 1) as f64;
                let clean = gamma_double_passage(0.0, theta, p);
                let noisy = clean * (1.0 + noise * (rng.random::<f64>() - 0.5) * 3.46);
                ProfileBin { label: theta, mean: noisy, stderr: noise.max(1e-12) * clean, count: 1 }
            })
            .collect();
        CbsProfile { bins }
    }

    fn experiment_params() -> DoublePassageParams {
        DoublePassageParams::ideal(2.0 * std::f64::consts::PI / 808e-9, 0.025, 4.4e-3).unwrap()
    }

    #[test]
    fn noiseless_profile_recovers_widths() {
        let p = experiment_params();
        let profile = synthetic(&p, 0.0, 0);
        let fit = fit_cbs_profile(&profile, CbsModel::TwoPhoton).unwrap();
        let wp_true = 1.0 / (2.0 * p.k * p.spacing * p.theta0);
        // envelope exp[-θ²/(4θ₀²)] has Gaussian σ = √2 θ₀
        let wb_true = std::f64::consts::SQRT_2 * p.theta0;
        assert_relative_eq!(fit.peak_width, wp_true, max_relative = 1e-6);
        assert_relative_eq!(fit.background_width, wb_true, max_relative = 1e-6);
        assert!(fit.detector_offset.abs() < 1e-9);
        assert!(fit.global_shift.abs() < 1e-9);
    }

    #[test]
    fn one_percent_noise_recovers_widths_to_five_percent() {
        let p = experiment_params();
        let wp_true = 1.0 / (2.0 * p.k * p.spacing * p.theta0);
        let mut worst: f64 = 0.0;
        for seed in 0..100 {
            let profile = synthetic(&p, 0.01, seed);
            let fit = fit_cbs_profile(&profile, CbsModel::TwoPhoton).unwrap();
            worst = worst.max((fit.peak_width / wp_true - 1.0).abs());
        }
        assert!(worst < 0.05, "worst relative width error {worst}");
    }

    #[test]
    fn flat_profile_is_rejected() {
        let bins = (0..32)
            .map(|i| ProfileBin { label: i as f64, mean: 1.0, stderr: 0.01, count: 1 })
            .collect();
        let err = fit_cbs_profile(&CbsProfile { bins }, CbsModel::OnePhoton).unwrap_err();
        assert!(matches!(err, FitError::NoPeak(_)));
    }

    #[test]
    fn too_few_bins_rejected() {
        let bins = (0..5)
            .map(|i| ProfileBin { label: i as f64, mean: i as f64, stderr: 0.1, count: 1 })
            .collect();
        let err = fit_cbs_profile(&CbsProfile { bins }, CbsModel::OnePhoton).unwrap_err();
        assert!(matches!(err, FitError::TooFewBins(5)));
    }

    #[test]
    fn fwhm_of_gaussian_peak() {
        let sigma = 0.7;
        let xs: Vec<f64> = (0..200).map(|i| -5.0 + 0.05 * i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 1.0 + 3.0 * (-x * x / (2.0 * sigma * sigma)).exp()).collect();
        let fwhm = fwhm_above_baseline(&xs, &ys, 1.0).unwrap();
        let expected = 2.0 * (2.0 * 2f64.ln()).sqrt() * sigma;
        assert_relative_eq!(fwhm, expected, max_relative = 1e-3);
    }
}
