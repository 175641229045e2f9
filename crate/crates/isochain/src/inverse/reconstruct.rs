//! Couplings from a single eigenpair.
//!
//! The eigenvalue equation at site `n`,
//! `E φ_n = F_{n-1} φ_{n-1} + F_n φ_{n+1}`, can be solved for `F_n` one site
//! at a time. For `E ≠ 0` this fixes every coupling. For `E = 0` the
//! vector vanishes on even sites and only the ratios
//! `F_{2k} / F_{2k-1} = -φ_{2k-1} / φ_{2k+1}` survive, so one scale per
//! odd-indexed coupling is needed.

use super::InverseError;
use crate::spectral::{three_term_residual, ChainCouplings};

const ZERO_ENERGY: f64 = 1e-12;
const VANISHING: f64 = 1e-14;
const RESIDUAL_TOL: f64 = 1e-8;

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Rebuilds the chain that has `vector` as eigenvector with eigenvalue
/// `energy`.
///
/// For nonzero energy `scale` is ignored and the answer is unique. For zero
/// energy every odd-indexed coupling is set to `scale`; use
/// [`reconstruct_zero_mode`] to give them separately.
///
/// Couplings that come out negative are replaced by their moduli, which
/// amounts to flipping the sign of the vector beyond that bond.
pub fn reconstruct_from_eigenpair(vector: &[f64], energy: f64, scale: f64) -> Result<ChainCouplings, InverseError> {
    if vector.is_empty() {
        return Err(InverseError::DimensionMismatch { couplings: 0, levels: 0 });
    }
    let norm = sup(vector);
    if energy.abs() <= ZERO_ENERGY * norm.max(1.0) {
        let n = vector.len() - 1;
        return reconstruct_zero_mode(vector, &vec![scale; n.div_ceil(2)]);
    }
    let n = vector.len() - 1;
    if vector.iter().all(|v| v.abs() > VANISHING * norm) {
        return finish(vector, energy, bond_sums(vector, energy));
    }
    let mut signed = Vec::with_capacity(n);
    let mut prev = 0.0;
    for i in 0..n {
        let next = vector[i + 1];
        if next.abs() <= VANISHING * norm {
            return Err(InverseError::ZeroDivision { index: i + 2 });
        }
        let back = if i == 0 { 0.0 } else { prev * vector[i - 1] };
        let f = (energy * vector[i] - back) / next;
        signed.push(f);
        prev = f;
    }
    finish(vector, energy, signed)
}

/// The same site-by-site solution written for the bond weights
/// `b_n = F_n φ_n φ_{n+1}`, which satisfy `b_{n-1} + b_n = E φ_n²`. Each
/// `b_n` is accumulated from whichever chain end gives the smaller partial
/// sum, so exponentially small tails of the vector do not feed cancellation
/// errors into the couplings.
fn bond_sums(vector: &[f64], energy: f64) -> Vec<f64> {
    let n = vector.len() - 1;
    let mut left = vec![0.0; n];
    let mut left_mass = vec![0.0; n];
    let (mut b, mut mass) = (0.0, 0.0);
    for i in 0..n {
        b = energy * vector[i] * vector[i] - b;
        mass += vector[i] * vector[i];
        left[i] = b;
        left_mass[i] = mass;
    }
    let mut signed = vec![0.0; n];
    let (mut b, mut mass) = (0.0, 0.0);
    for i in (0..n).rev() {
        b = energy * vector[i + 1] * vector[i + 1] - b;
        mass += vector[i + 1] * vector[i + 1];
        let chosen = if mass < left_mass[i] { b } else { left[i] };
        signed[i] = chosen / (vector[i] * vector[i + 1]);
    }
    signed
}

/// Zero-energy reconstruction with `scales[k] = F_{2k+1}`, `⌈N/2⌉` entries.
pub fn reconstruct_zero_mode(vector: &[f64], scales: &[f64]) -> Result<ChainCouplings, InverseError> {
    if vector.is_empty() {
        return Err(InverseError::DimensionMismatch { couplings: 0, levels: 0 });
    }
    let n = vector.len() - 1;
    if scales.len() != n.div_ceil(2) {
        return Err(InverseError::ScaleCount { expected: n.div_ceil(2), got: scales.len() });
    }
    let norm = sup(vector);
    let mut signed = Vec::with_capacity(n);
    for i in 0..n {
        if i % 2 == 0 {
            signed.push(scales[i / 2]);
        } else {
            // bond 2k from site 2k: F_{2k} = -F_{2k-1} φ_{2k-1} / φ_{2k+1}
            let next = vector[i + 1];
            if next.abs() <= VANISHING * norm {
                return Err(InverseError::ZeroDivision { index: i + 2 });
            }
            signed.push(-signed[i - 1] * vector[i - 1] / next);
        }
    }
    finish(vector, 0.0, signed)
}

fn finish(vector: &[f64], energy: f64, signed: Vec<f64>) -> Result<ChainCouplings, InverseError> {
    let scale = sup(&signed).max(energy.abs()).max(f64::MIN_POSITIVE) * sup(vector);
    let residual = three_term_residual(&signed, energy, vector);
    if !(residual <= RESIDUAL_TOL * scale) {
        return Err(InverseError::NotAnEigenvector { residual });
    }
    Ok(ChainCouplings::new(signed.into_iter().map(f64::abs).collect())?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::eig_jacobi;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        let r2 = 2f64.sqrt();
        let c = reconstruct_from_eigenpair(&[0.5, r2 / 2.0, 0.5], r2, 0.0).unwrap();
        assert!(c.values().iter().all(|f| (f - 1.0).abs() < 1e-14));
        let s10 = 10f64.sqrt();
        let s5 = 5f64.sqrt();
        let c = reconstruct_from_eigenpair(&[1.0 / s10, s5 / s10, 2.0 / s10], s5, 0.0).unwrap();
        assert!((c.values()[0] - 1.0).abs() < 1e-14 && (c.values()[1] - 2.0).abs() < 1e-14);
        let c = reconstruct_from_eigenpair(&[1.0 / r2, 0.0, -1.0 / r2], 0.0, 1.0).unwrap();
        assert_eq!(c.values(), &[1.0, 1.0]);
    }

    #[test]
    fn zero_mode_with_independent_scales() {
        // N = 4: F_1, F_3 free, F_2 and F_4 follow
        let f = ChainCouplings::new(vec![0.7, 1.3, 0.4, 2.0]).unwrap();
        let eig = eig_jacobi(&f);
        let zero = eig.vector(2);
        let c = reconstruct_zero_mode(&zero, &[0.7, 0.4]).unwrap();
        for (a, b) in c.values().iter().zip(f.values()) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(matches!(reconstruct_zero_mode(&zero, &[1.0]), Err(InverseError::ScaleCount { .. })));
    }

    #[test]
    fn vanishing_component_reports_index() {
        let err = reconstruct_from_eigenpair(&[1.0, 0.0, 1.0], 1.0, 1.0).unwrap_err();
        assert_eq!(err, InverseError::ZeroDivision { index: 2 });
    }

    #[test]
    fn non_eigenvector_rejected() {
        let err = reconstruct_from_eigenpair(&[0.5, 0.5, 0.5], 1.0, 1.0).unwrap_err();
        assert!(matches!(err, InverseError::NotAnEigenvector { .. }));
    }

    proptest! {
        #[test]
        fn perron_vector_recovers_chain(f in prop::collection::vec(0.5f64..2.0, 1..16)) {
            let c = ChainCouplings::new(f.clone()).unwrap();
            let eig = eig_jacobi(&c);
            let top = eig.size() - 1;
            let r = reconstruct_from_eigenpair(&eig.vector(top), eig.energy(top), 0.0).unwrap();
            for (a, b) in r.values().iter().zip(&f) {
                prop_assert!((a - b).abs() <= 1e-9 * b, "{a} vs {b}");
            }
        }
    }
}
