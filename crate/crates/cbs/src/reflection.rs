//! Reflection matrices over a mode basis.

use std::sync::Arc;

use ndarray::Array2;
use num_complex::Complex64;
use thiserror::Error;

use crate::modes::ModeBasis;

#[derive(Debug, Error)]
pub enum ReflectionError {
    #[error("matrix is {rows}x{cols} but the basis has {n} modes")]
    ShapeMismatch { rows: usize, cols: usize, n: usize },
    #[error(
        "reciprocity violated: max |r(q,q') - r(-q',-q)| = {deviation:.3e} \
         exceeds {tolerance:.3e} * max|r| = {bound:.3e}"
    )]
    NotReciprocal { deviation: f64, tolerance: f64, bound: f64 },
}

/// Complex reflection matrix `r` with rows = outgoing modes, columns =
/// incoming modes of its [`ModeBasis`].
#[derive(Clone, Debug)]
pub struct ReflectionMatrix {
    basis: Arc<ModeBasis>,
    entries: Array2<Complex64>,
    reciprocal: bool,
}

impl ReflectionMatrix {
    /// Wrap a matrix without asserting reciprocity.
    pub fn new(basis: Arc<ModeBasis>, entries: Array2<Complex64>) -> Result<Self, ReflectionError> {
        let n = basis.n_modes();
        let (rows, cols) = entries.dim();
        if rows != n || cols != n {
            return Err(ReflectionError::ShapeMismatch { rows, cols, n });
        }
        Ok(Self { basis, entries, reciprocal: false })
    }

    /// Wrap a matrix and validate `r(q,q') = r(-q',-q)` to a relative
    /// tolerance (relative to `max |r|`).
    pub fn new_reciprocal(
        basis: Arc<ModeBasis>,
        entries: Array2<Complex64>,
        tolerance: f64,
    ) -> Result<Self, ReflectionError> {
        let mut r = Self::new(basis, entries)?;
        let deviation = r.reciprocity_deviation();
        let scale = r.max_abs();
        let bound = tolerance * scale;
        if deviation > bound && scale > 0.0 {
            return Err(ReflectionError::NotReciprocal { deviation, tolerance, bound });
        }
        r.reciprocal = true;
        Ok(r)
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |r(q,q') - r(-q',-q)|` over all entries.
    pub fn reciprocity_deviation(&self) -> f64 {
        let n = self.basis.n_modes();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let mirror = self.entries[[self.basis.negate_index(j), self.basis.negate_index(i)]];
                let d = (self.entries[[i, j]] - mirror).norm();
                if d > worst {
                    worst = d;
                }
            }
        }
        worst
    }

    /// Reciprocal symmetrization `(m + reverse-transpose(m)) / 2`.
    ///
    /// The reverse-transpose maps entry `(q, q')` to `(-q', -q)`; averaging a
    /// matrix with its reverse-transpose always yields an exactly reciprocal
    /// matrix.
    pub fn symmetrized(basis: Arc<ModeBasis>, m: &Array2<Complex64>) -> Result<Self, ReflectionError> {
        let n = basis.n_modes();
        let (rows, cols) = m.dim();
        if rows != n || cols != n {
            return Err(ReflectionError::ShapeMismatch { rows, cols, n });
        }
        let mut s = Array2::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                let mirror = m[[basis.negate_index(j), basis.negate_index(i)]];
                s[[i, j]] = 0.5 * (m[[i, j]] + mirror);
            }
        }
        Self::new_reciprocal(basis, s, 1e-10)
    }

    pub fn basis(&self) -> &ModeBasis {
        &self.basis
    }

    pub fn basis_arc(&self) -> Arc<ModeBasis> {
        Arc::clone(&self.basis)
    }

    pub fn n_modes(&self) -> usize {
        self.basis.n_modes()
    }

    pub fn is_reciprocal(&self) -> bool {
        self.reciprocal
    }

    pub fn entries(&self) -> &Array2<Complex64> {
        &self.entries
    }

    pub fn entry(&self, out_mode: usize, in_mode: usize) -> Complex64 {
        self.entries[[out_mode, in_mode]]
    }

    /// Single element of the matrix square, `(r²)_{out, in}`.
    pub fn squared_entry(&self, out_mode: usize, in_mode: usize) -> Complex64 {
        let row = self.entries.row(out_mode);
        let col = self.entries.column(in_mode);
        row.iter().zip(col.iter()).map(|(a, b)| a * b).sum()
    }

    /// Scale every entry by a complex constant.
    pub fn scaled(&self, c: Complex64) -> Self {
        Self {
            basis: Arc::clone(&self.basis),
            entries: self.entries.mapv(|z| z * c),
            reciprocal: self.reciprocal,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modes::ModeBasis;
    use ndarray::Array2;
    use num_complex::Complex64;
    use rand::Rng;
    use rand_chacha::ChaCha8Rng;
    use rand_chacha::rand_core::SeedableRng;

    fn random_matrix(n: usize, seed: u64) -> Array2<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Array2::from_shape_fn((n, n), |_| {
            Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        })
    }

    #[test]
    fn symmetrization_passes_reciprocity_check() {
        for n in [3usize, 4, 7] {
            let basis = Arc::new(ModeBasis::symmetric(n, 0.3, 5.0).unwrap());
            let m = random_matrix(n, 42 + n as u64);
            let r = ReflectionMatrix::symmetrized(Arc::clone(&basis), &m).unwrap();
            assert!(r.is_reciprocal());
            assert!(r.reciprocity_deviation() <= 1e-10 * r.max_abs());
        }
    }

    #[test]
    fn non_reciprocal_matrix_rejected() {
        let basis = Arc::new(ModeBasis::symmetric(4, 0.3, 5.0).unwrap());
        let m = random_matrix(4, 7);
        let err = ReflectionMatrix::new_reciprocal(basis, m, 1e-10).unwrap_err();
        assert!(matches!(err, ReflectionError::NotReciprocal { .. }));
    }

    #[test]
    fn squared_entry_matches_full_product() {
        let basis = Arc::new(ModeBasis::symmetric(5, 0.3, 5.0).unwrap());
        let m = random_matrix(5, 11);
        let r = ReflectionMatrix::new(basis, m.clone()).unwrap();
        let full = m.dot(&m);
        for i in 0..5 {
            for j in 0..5 {
                assert!((r.squared_entry(i, j) - full[[i, j]]).norm() < 1e-12);
            }
        }
    }
}
