//! Discrete bases of transverse momenta.
//!
//! Every reflection matrix in this crate is indexed by a [`ModeBasis`]: a
//! uniformly spaced grid of transverse momenta `q` together with the
//! wavenumber `k`. Reciprocity relates the matrix element `(q, q')` to
//! `(-q', -q)`, so the basis must know how to negate a mode index. Two
//! conventions exist:
//!
//! * [`Negation::Mirror`] — free-space bases, symmetric about `q = 0`; the
//!   index of `-q` is the mirrored index.
//! * [`Negation::SelfDual`] — waveguide bases in which `q` and `-q` label
//!   the same channel, so negation is the identity.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// How mode indices transform under `q -> -q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Negation {
    /// `q[negate(i)] = -q[i]`, with the grid symmetric about zero.
    Mirror,
    /// `q` and `-q` are identified (waveguide channels); `negate(i) = i`.
    SelfDual,
}

#[derive(Debug, Error)]
pub enum BasisError {
    #[error("mode count must be at least 2, got {0}")]
    TooFewModes(usize),
    #[error("grid spacing must be positive and finite, got {0}")]
    BadSpacing(f64),
    #[error("wavenumber must be positive and finite, got {0}")]
    BadWavenumber(f64),
    #[error("momentum grid is not symmetric: q[{i}] = {qi}, q[{j}] = {qj}")]
    Asymmetric { i: usize, qi: f64, j: usize, qj: f64 },
}

/// A uniform grid of `N` transverse momenta with wavenumber `k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeBasis {
    q_values: Vec<f64>,
    dq: f64,
    k: f64,
    negation: Negation,
}

impl ModeBasis {
    /// Symmetric free-space grid of `n` momenta spaced by `dq`.
    ///
    /// Odd `n` yields integer multiples of `dq` including `q = 0`; even `n`
    /// yields half-integer multiples `±dq/2, ±3dq/2, …`. Either way the grid
    /// is closed under negation.
    pub fn symmetric(n: usize, dq: f64, k: f64) -> Result<Self, BasisError> {
        if n < 2 {
            return Err(BasisError::TooFewModes(n));
        }
        if !(dq.is_finite() && dq > 0.0) {
            return Err(BasisError::BadSpacing(dq));
        }
        if !(k.is_finite() && k > 0.0) {
            return Err(BasisError::BadWavenumber(k));
        }
        let mid = (n as f64 - 1.0) / 2.0;
        let q_values = (0..n).map(|i| (i as f64 - mid) * dq).collect();
        Ok(Self { q_values, dq, k, negation: Negation::Mirror })
    }

    /// Waveguide basis of `n` channels in which `q` and `-q` are identified.
    ///
    /// The stored `q` values label channels `0, dq, 2dq, …`; they only enter
    /// bookkeeping, never a negation.
    pub fn waveguide(n: usize, dq: f64, k: f64) -> Result<Self, BasisError> {
        if n < 2 {
            return Err(BasisError::TooFewModes(n));
        }
        if !(dq.is_finite() && dq > 0.0) {
            return Err(BasisError::BadSpacing(dq));
        }
        if !(k.is_finite() && k > 0.0) {
            return Err(BasisError::BadWavenumber(k));
        }
        let q_values = (0..n).map(|i| i as f64 * dq).collect();
        Ok(Self { q_values, dq, k, negation: Negation::SelfDual })
    }

    /// Free-space basis from an explicit strictly increasing grid.
    ///
    /// The grid must be symmetric about zero within `1e-12 * dq`.
    pub fn from_grid(q_values: Vec<f64>, k: f64) -> Result<Self, BasisError> {
        let n = q_values.len();
        if n < 2 {
            return Err(BasisError::TooFewModes(n));
        }
        if !(k.is_finite() && k > 0.0) {
            return Err(BasisError::BadWavenumber(k));
        }
        let dq = q_values[1] - q_values[0];
        if !(dq.is_finite() && dq > 0.0) {
            return Err(BasisError::BadSpacing(dq));
        }
        for i in 0..n {
            let j = n - 1 - i;
            if (q_values[i] + q_values[j]).abs() > 1e-12 * dq.abs() {
                return Err(BasisError::Asymmetric { i, qi: q_values[i], j, qj: q_values[j] });
            }
            if i + 1 < n && q_values[i + 1] - q_values[i] <= 0.0 {
                return Err(BasisError::BadSpacing(q_values[i + 1] - q_values[i]));
            }
        }
        Ok(Self { q_values, dq, k, negation: Negation::Mirror })
    }

    pub fn n_modes(&self) -> usize {
        self.q_values.len()
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn dq(&self) -> f64 {
        self.dq
    }

    pub fn q(&self, i: usize) -> f64 {
        self.q_values[i]
    }

    pub fn q_values(&self) -> &[f64] {
        &self.q_values
    }

    pub fn negation(&self) -> Negation {
        self.negation
    }

    /// Index `j` with `q[j] = -q[i]` (or `i` itself for waveguide bases).
    pub fn negate_index(&self, i: usize) -> usize {
        debug_assert!(i < self.q_values.len());
        match self.negation {
            Negation::Mirror => self.q_values.len() - 1 - i,
            Negation::SelfDual => i,
        }
    }

    /// Index of the grid point closest to `q = 0`.
    pub fn index_near_zero(&self) -> usize {
        let mut best = 0;
        for (i, q) in self.q_values.iter().enumerate() {
            if q.abs() < self.q_values[best].abs() {
                best = i;
            }
        }
        best
    }

    /// Index of the grid point closest to momentum `q`.
    pub fn index_near(&self, q: f64) -> usize {
        let mut best = 0;
        let mut dist = f64::INFINITY;
        for (i, qi) in self.q_values.iter().enumerate() {
            let d = (qi - q).abs();
            if d < dist {
                dist = d;
                best = i;
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn negate_mirrors_symmetric_grid() {
        // grid {-2,-1,0,1,2}*dq: i=4 negates to 0
        let b = ModeBasis::symmetric(5, 0.5, 1.0).unwrap();
        assert_eq!(b.negate_index(4), 0);
        assert_eq!(b.q(b.negate_index(4)), -b.q(4));
    }

    #[test]
    fn zero_mode_is_fixed_point() {
        let b = ModeBasis::symmetric(5, 0.5, 1.0).unwrap();
        let i0 = b.index_near_zero();
        assert_eq!(b.q(i0), 0.0);
        assert_eq!(b.negate_index(i0), i0);
    }

    #[test]
    fn negate_is_involution() {
        for n in [2usize, 5, 8, 17] {
            let b = ModeBasis::symmetric(n, 0.25, 2.0).unwrap();
            for i in 0..n {
                assert_eq!(b.negate_index(b.negate_index(i)), i);
                assert!((b.q(b.negate_index(i)) + b.q(i)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn even_grid_has_half_integer_momenta() {
        let b = ModeBasis::symmetric(4, 1.0, 1.0).unwrap();
        assert_eq!(b.q_values(), &[-1.5, -0.5, 0.5, 1.5]);
    }

    #[test]
    fn asymmetric_grid_rejected() {
        let err = ModeBasis::from_grid(vec![-1.0, 0.0, 2.0], 1.0).unwrap_err();
        assert!(matches!(err, BasisError::Asymmetric { .. }));
    }

    #[test]
    fn waveguide_negation_is_identity() {
        let b = ModeBasis::waveguide(6, 1.0, 2.0).unwrap();
        for i in 0..6 {
            assert_eq!(b.negate_index(i), i);
        }
    }
}
