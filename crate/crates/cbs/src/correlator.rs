//! Two-photon coincidence correlator of the EPR state.
//!
//! For the momentum-anticorrelated pair state
//! `|ψ⟩ = Σ_i c†_{q_i} c†_{-q_i} |0⟩ / √(2N)`, the disorder-free coincidence
//! correlator of two reflected modes reduces, for a reciprocal reflection
//! matrix, to `Γ_ba = (2/N) |(r²)_{q_b, -q_a}|²`. [`epr_gamma`] evaluates
//! that reduced form; [`epr_gamma_oracle`] evaluates the unreduced
//! second-quantized sum with the Kronecker deltas of the vacuum expectation
//! enumerated explicitly, and serves as the independent check of the
//! reciprocity shortcut.

use num_complex::Complex64;
use thiserror::Error;

use crate::reflection::ReflectionMatrix;

/// Largest mode count accepted by the brute-force oracle.
pub const ORACLE_MAX_MODES: usize = 16;

#[derive(Debug, Error)]
pub enum CorrelatorError {
    #[error("reflection matrix must be validated as reciprocal")]
    NotReciprocal,
    #[error("mode index {index} out of range for {n} modes")]
    BadIndex { index: usize, n: usize },
    #[error("oracle is O(N^3) per pair and limited to N <= {max}, got N = {n}")]
    OracleTooLarge { n: usize, max: usize },
}

fn check_index(i: usize, n: usize) -> Result<(), CorrelatorError> {
    if i >= n {
        return Err(CorrelatorError::BadIndex { index: i, n });
    }
    Ok(())
}

/// `Γ_ba = (2/N) |(r²)_{q_b, -q_a}|²` for a reciprocal reflection matrix.
pub fn epr_gamma(r: &ReflectionMatrix, a: usize, b: usize) -> Result<f64, CorrelatorError> {
    if !r.is_reciprocal() {
        return Err(CorrelatorError::NotReciprocal);
    }
    let n = r.n_modes();
    check_index(a, n)?;
    check_index(b, n)?;
    let neg_a = r.basis().negate_index(a);
    let amp = r.squared_entry(b, neg_a);
    Ok(2.0 / n as f64 * amp.norm_sqr())
}

/// Brute-force coincidence correlator, straight from the second-quantized
/// expectation value.
///
/// Evaluates `(1/2N) |Σ_{a',b',i} r_{q_a,q_{a'}} r_{q_b,q_{b'}} M(a',b',i)|²`
/// where `M(a',b',i) = ⟨0| c_{a'} c_{b'} c†_i c†_{-i} |0⟩
/// = δ_{a',i} δ_{b',-i} + δ_{a',-i} δ_{b',i}`. The triple sum is enumerated
/// term by term with no algebraic simplification, so the result does not
/// presuppose reciprocity of `r`.
pub fn epr_gamma_oracle(r: &ReflectionMatrix, a: usize, b: usize) -> Result<f64, CorrelatorError> {
    let n = r.n_modes();
    if n > ORACLE_MAX_MODES {
        return Err(CorrelatorError::OracleTooLarge { n, max: ORACLE_MAX_MODES });
    }
    check_index(a, n)?;
    check_index(b, n)?;
    let basis = r.basis();
    let mut amp = Complex64::new(0.0, 0.0);
    for a_prime in 0..n {
        for b_prime in 0..n {
            for i in 0..n {
                let neg_i = basis.negate_index(i);
                let mut element = 0.0;
                if a_prime == i && b_prime == neg_i {
                    element += 1.0;
                }
                if a_prime == neg_i && b_prime == i {
                    element += 1.0;
                }
                if element != 0.0 {
                    amp += r.entry(a, a_prime) * r.entry(b, b_prime) * element;
                }
            }
        }
    }
    Ok(amp.norm_sqr() / (2.0 * n as f64))
}
