//! Explicit eight-term Gaussian (diffuson/cooperon) sum for the two-photon
//! correlator over a finite mode set,
//!
//! ```text
//! Γ_ba = Σ_{q'} [F(0) + F(|q'+q_b|)]·[F(0) + F(|q'-q_a|)]
//!      + [F(|q'+q_a|) + F(|q_b-q_a|)]·[F(|q'-q_b|) + F(|q_b-q_a|)]
//! ```
//!
//! The first two of the eight expanded terms (bi-diffuson and bi-cooperon)
//! are of order `N`; the six mixed diffuson/cooperon terms are suppressed by
//! `1/kℓ` and carry the long-range corrections.

/// Full eight-term sum over the supplied mode momenta.
pub fn gamma_gaussian_full(
    q_a: f64,
    q_b: f64,
    modes: &[f64],
    f: impl Fn(f64) -> f64,
) -> f64 {
    let f0 = f(0.0);
    let f_ab = f((q_b - q_a).abs());
    let mut total = 0.0;
    for &q in modes {
        total += (f0 + f((q + q_b).abs())) * (f0 + f((q - q_a).abs()))
            + (f((q + q_a).abs()) + f_ab) * (f((q - q_b).abs()) + f_ab);
    }
    total
}

/// Only the order-`N` bi-diffuson + bi-cooperon part,
/// `N [F(0)² + F(|q_a-q_b|)²]`.
pub fn gamma_gaussian_leading(q_a: f64, q_b: f64, n_modes: usize, f: impl Fn(f64) -> f64) -> f64 {
    let f0 = f(0.0);
    let f_ab = f((q_b - q_a).abs());
    n_modes as f64 * (f0 * f0 + f_ab * f_ab)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::lineshape::f_smallq;
    use approx::assert_relative_eq;

    fn grid(n_half: usize, dq: f64) -> Vec<f64> {
        (-(n_half as isize)..=n_half as isize).map(|i| i as f64 * dq).collect()
    }

    /// With F(q) = F₀ δ_{q,0} the sum reduces to the Gaussian-matrix pattern
    /// (1+δ_ab) N F₀² + (2+4δ_ab) F₀² at coinciding or generic mode pairs.
    #[test]
    fn delta_correlator_reduces_to_gaussian_matrix_pattern() {
        let dq = 1.0;
        let modes = grid(8, dq);
        let n = modes.len() as f64;
        let f0 = 0.37;
        let delta_f = move |q: f64| if q.abs() < 1e-9 { f0 } else { 0.0 };

        // diagonal direction q_a = q_b = 0: (1+1)NF₀² + (2+4)F₀²
        let diag = gamma_gaussian_full(0.0, 0.0, &modes, delta_f);
        assert_relative_eq!(diag, 2.0 * n * f0 * f0 + 6.0 * f0 * f0, max_relative = 1e-12);

        // generic off-diagonal pair (q_b ≠ ±q_a): NF₀² + 2F₀²
        let off = gamma_gaussian_full(2.0 * dq, 5.0 * dq, &modes, delta_f);
        assert_relative_eq!(off, n * f0 * f0 + 2.0 * f0 * f0, max_relative = 1e-12);
    }

    /// Mixed diffuson/cooperon terms are suppressed as 1/(kℓ) relative to the
    /// leading pair on a synthetic F(q) = 1/(1+qℓ)² grid.
    #[test]
    fn mixed_terms_scale_inversely_with_k_ell() {
        let k = 1.0;
        let dq = k / 200.0;
        let modes = grid(200, dq); // |q| ≤ k
        let ratio_at = |ell: f64| {
            let full = gamma_gaussian_full(0.0, 3.0 * dq, &modes, |q| f_smallq(q, ell));
            let lead = gamma_gaussian_leading(0.0, 3.0 * dq, modes.len(), |q| f_smallq(q, ell));
            (full - lead) / lead
        };
        let r10 = ratio_at(10.0 / k);
        let r100 = ratio_at(100.0 / k);
        let suppression = r10 / r100;
        assert!(
            (suppression - 10.0).abs() <= 2.0,
            "expected ×10 suppression ±20%, got {suppression} (r10={r10}, r100={r100})"
        );
    }

    #[test]
    fn degenerate_direction_dominated_by_two_n_f0_squared() {
        let modes = grid(4000, 0.01);
        let ell = 400.0;
        let g = gamma_gaussian_full(0.0, 0.0, &modes, |q| f_smallq(q, ell));
        let lead = 2.0 * modes.len() as f64;
        assert!((g / lead - 1.0).abs() < 0.05, "g/lead = {}", g / lead);
    }
}
