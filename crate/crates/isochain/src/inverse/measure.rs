//! Surface points from spectral weights.
//!
//! A Jacobi matrix is fixed by its eigenvalues together with the weights
//! `w_k = (φ_1^k)²` of the first site. The diagonal vanishes exactly when
//! the weights are symmetric, `w(E) = w(-E)`, so the isospectral surface of
//! zero-diagonal chains is parametrized by one weight per level pair (plus
//! one for the zero level) up to normalization: `⌊N/2⌋` free parameters.
//! The chain is recovered by Lanczos tridiagonalization of `diag(E)` from
//! the start vector `√w`.

use super::InverseError;
use crate::spectral::{ChainCouplings, SymmetricSpectrum};

/// Number of independent weights for `target`: one per `±E` pair, plus one
/// for the zero level when the size is odd.
pub fn weight_count(target: &SymmetricSpectrum) -> usize {
    target.len().div_ceil(2)
}

/// The zero-diagonal chain whose first-site weights are `weights`, given
/// for the nonnegative levels in ascending order and shared by each `±E`
/// pair. Weights need not be normalized.
pub fn chain_from_weights(target: &SymmetricSpectrum, weights: &[f64]) -> Result<ChainCouplings, InverseError> {
    let expected = weight_count(target);
    if weights.len() != expected {
        return Err(InverseError::DimensionMismatch { couplings: weights.len(), levels: target.len() });
    }
    if weights.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
        return Err(InverseError::InvalidWeights);
    }
    let energies = target.values();
    let size = energies.len();
    let lower = size / 2;
    if energies.windows(2).any(|p| p[1] - p[0] <= 1e-14 * target.max_abs()) {
        return Err(InverseError::DegenerateTarget);
    }
    // level i ascending; levels below zero take the weight of their mirror
    let full: Vec<f64> = (0..size)
        .map(|i| if i < lower { weights[lower - 1 - i + size % 2] } else { weights[i - lower] })
        .collect();
    let total: f64 = full.iter().sum();
    let mut basis: Vec<Vec<f64>> = vec![full.iter().map(|w| (w / total).sqrt()).collect()];
    let mut couplings = Vec::with_capacity(size - 1);
    let mut beta = 0.0;
    for j in 0..size - 1 {
        let q = &basis[j];
        let mut v: Vec<f64> = q.iter().zip(energies).map(|(a, e)| a * e).collect();
        if j > 0 {
            for (vi, p) in v.iter_mut().zip(&basis[j - 1]) {
                *vi -= beta * p;
            }
        }
        // two passes of full reorthogonalization also remove the
        // (analytically zero) diagonal component
        for _ in 0..2 {
            for b in &basis {
                let dot: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= dot * bi;
                }
            }
        }
        beta = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if beta <= 1e-14 * target.max_abs() {
            return Err(InverseError::InvalidWeights);
        }
        couplings.push(beta);
        basis.push(v.into_iter().map(|x| x / beta).collect());
    }
    Ok(ChainCouplings::new(couplings)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::eig_jacobi;
    use proptest::prelude::*;

    fn spec(v: &[f64]) -> SymmetricSpectrum {
        SymmetricSpectrum::new(v.to_vec()).unwrap()
    }

    #[test]
    fn unit_chain_weights_recover_unit_chain() {
        let chain = ChainCouplings::uniform(5, 1.0).unwrap();
        let eig = eig_jacobi(&chain);
        let size = eig.size();
        let w: Vec<f64> = (size / 2..size).map(|k| eig.component(0, k).powi(2)).collect();
        let back = chain_from_weights(&eig.spectrum, &w).unwrap();
        for f in back.values() {
            assert!((f - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn circle_parametrized_by_weights() {
        let r2 = 2f64.sqrt();
        let t = spec(&[-r2, 0.0, r2]);
        for w0 in [0.1, 0.5, 2.0, 10.0] {
            let c = chain_from_weights(&t, &[w0, 1.0]).unwrap();
            let x = c.squares();
            assert!((x[0] + x[1] - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_input() {
        let t = spec(&[-1.0, 1.0]);
        assert!(chain_from_weights(&t, &[1.0, 1.0]).is_err());
        assert!(chain_from_weights(&t, &[0.0]).is_err());
    }

    proptest! {
        #[test]
        fn weights_roundtrip(f in prop::collection::vec(0.2f64..2.0, 1..14)) {
            let chain = ChainCouplings::new(f.clone()).unwrap();
            let eig = eig_jacobi(&chain);
            let size = eig.size();
            let w: Vec<f64> = (size / 2..size).map(|k| eig.component(0, k).powi(2)).collect();
            let back = chain_from_weights(&eig.spectrum, &w).unwrap();
            for (a, b) in back.values().iter().zip(&f) {
                prop_assert!((a - b).abs() <= 1e-8 * b);
            }
        }
    }
}
