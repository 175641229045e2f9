//! Forward spectral machinery for chains without local potentials.
//!
//! The Hamiltonian of an `(N+1)`-site chain is the Jacobi matrix with zero
//! diagonal and positive off-diagonal couplings `F_1..F_N`. Its spectrum is
//! simple and symmetric about zero; for even `N` it contains zero.

mod chain;
mod charpoly;
mod gauge;
mod tridiag;

use thiserror::Error;

pub use chain::{
    three_term_residual, ChainCouplings, CharPolyCoeffs, EigenSystem, SymmetricSpectrum, SYMMETRY_TOL,
};
pub use charpoly::{
    charpoly_coeffs, charpoly_coeffs_closed, charpoly_eval, esp_from_energies, esp_from_spectrum,
    CLOSED_FORM_MAX_N,
};
pub(crate) use charpoly::{coeffs_from_squares, expand_roots};
pub use gauge::{gauge_reduce, GaugeReduction};
pub use tridiag::{sturm_count, sturm_eigenvalues, tridiag_eigen};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("coupling F_{index} = {value} must be positive (a zero coupling disconnects the chain)")]
    NonPositiveCoupling { index: usize, value: f64 },
    #[error("coupling F_{index} is not finite")]
    NonFiniteCoupling { index: usize },
    #[error("energy E_{index} is not finite")]
    NonFiniteEnergy { index: usize },
    #[error("spectrum is empty")]
    EmptySpectrum,
    #[error("spectrum is not symmetric about zero: violation {violation:e} exceeds {tolerance:e}")]
    Asymmetric { violation: f64, tolerance: f64 },
    #[error("characteristic polynomial must be monic")]
    NotMonic,
    #[error("closed-form coefficients are limited to N <= {max}, got N = {n}")]
    SizeLimit { n: usize, max: usize },
    #[error("order j = {j} out of range for N = {n}")]
    OrderOutOfRange { j: usize, n: usize },
}

/// All eigenpairs of the chain by implicit QL on the zero-diagonal
/// tridiagonal matrix. Eigenvectors are signed so that `φ_1 > 0`.
pub fn eig_jacobi(couplings: &ChainCouplings) -> EigenSystem {
    let n = couplings.sites();
    let (values, vectors) = tridiag_eigen(&vec![0.0; n], couplings.values());
    EigenSystem::new(SymmetricSpectrum::from_sorted_unchecked(values), vectors)
}

/// Eigenvalues only, by Sturm bisection. Independent of [`eig_jacobi`].
pub fn eigenvalues_bisection(couplings: &ChainCouplings) -> Vec<f64> {
    sturm_eigenvalues(&vec![0.0; couplings.sites()], couplings.values())
}

/// Closed-form eigensystem of the uniform unit chain:
/// `⟨n|k⟩ = √(2/(N+2)) sin(nkπ/(N+2))`, `E_k = 2 cos(kπ/(N+2))`.
///
/// Levels are returned in ascending order, i.e. `k = N+1` first.
pub fn homogeneous_eigensystem(n: usize) -> EigenSystem {
    let size = n + 1;
    let denom = (n + 2) as f64;
    let norm = (2.0 / denom).sqrt();
    let pi = std::f64::consts::PI;
    let mut values = Vec::with_capacity(size);
    let mut vectors = vec![0.0; size * size];
    for (col, k) in (1..=size).rev().enumerate() {
        values.push(2.0 * (k as f64 * pi / denom).cos());
        for site in 1..=size {
            vectors[(site - 1) * size + col] = norm * ((site * k) as f64 * pi / denom).sin();
        }
    }
    // cos is only symmetric to round-off; mirror the upper half exactly
    for i in 0..size / 2 {
        values[i] = -values[size - 1 - i];
    }
    if size % 2 == 1 {
        values[size / 2] = 0.0;
    }
    EigenSystem::new(SymmetricSpectrum::from_sorted_unchecked(values), vectors)
}

/// Dense eigenvector matrix of the unit chain as `⟨n|k⟩`, indexed
/// `[site][k]` with `k = 1..N+1` in the natural (descending-energy) order.
pub(crate) fn unit_chain_basis(n: usize) -> Vec<Vec<f64>> {
    let size = n + 1;
    let denom = (n + 2) as f64;
    let norm = (2.0 / denom).sqrt();
    (1..=size)
        .map(|site| {
            (1..=size)
                .map(|k| norm * ((site * k) as f64 * std::f64::consts::PI / denom).sin())
                .collect()
        })
        .collect()
}
