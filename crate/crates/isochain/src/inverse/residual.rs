//! The polynomial system linking squared couplings to a target spectrum.
//!
//! Unknowns are `x_n = F_n²`. For each order `j < N` with `N - j` odd the
//! chain coefficient `Λ_N^j(x)` must equal the target coefficient
//! `e_{N+1-j}(E)`; the remaining orders vanish identically (parity) or are
//! fixed (`Λ^{N+1} = 1`). That leaves `⌊(N+1)/2⌋` equations.

use super::InverseError;
use crate::spectral::{coeffs_from_squares, esp_from_spectrum, SymmetricSpectrum};

/// Orders `j` that carry an equation, ascending.
pub fn active_orders(n: usize) -> Vec<usize> {
    (0..n).filter(|j| (n - j) % 2 == 1).collect()
}

fn check_dims(x: &[f64], target: &SymmetricSpectrum) -> Result<(), InverseError> {
    if x.len() != target.chain_len() {
        return Err(InverseError::DimensionMismatch { couplings: x.len(), levels: target.len() });
    }
    Ok(())
}

/// `Λ_chain(x)^j - Λ_target^j` over the active orders.
pub fn residual(squared_couplings: &[f64], target: &SymmetricSpectrum) -> Result<Vec<f64>, InverseError> {
    check_dims(squared_couplings, target)?;
    let chain = coeffs_from_squares(squared_couplings);
    let goal = esp_from_spectrum(target);
    Ok(active_orders(squared_couplings.len())
        .into_iter()
        .map(|j| chain[j] - goal[j])
        .collect())
}

/// Coefficients together with their derivatives with respect to every
/// `x_m`, by differentiating the size recurrence alongside it:
/// `∂Λ_n^j = ∂Λ_{n-1}^{j-1} - x_n ∂Λ_{n-2}^j - δ_{nm} Λ_{n-2}^j`.
///
/// Returns `(coeffs, grad)` with `grad[m][j] = ∂Λ_N^j / ∂x_{m+1}`.
pub(crate) fn coeffs_with_gradient(x: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = x.len();
    let mut p2 = vec![1.0];
    let mut p1 = vec![0.0, 1.0];
    let mut d2: Vec<Vec<f64>> = vec![vec![0.0; 1]; n];
    let mut d1: Vec<Vec<f64>> = vec![vec![0.0; 2]; n];
    for (level, &xl) in x.iter().enumerate() {
        let size = level + 3;
        let mut next = vec![0.0; size];
        next[1..size].copy_from_slice(&p1[..size - 1]);
        for (j, c) in p2.iter().enumerate() {
            next[j] -= xl * c;
        }
        let mut dnext: Vec<Vec<f64>> = Vec::with_capacity(n);
        for m in 0..n {
            let mut row = vec![0.0; size];
            if m <= level {
                row[1..size].copy_from_slice(&d1[m][..size - 1]);
                for (j, c) in d2[m].iter().enumerate() {
                    row[j] -= xl * c;
                }
                if m == level {
                    for (j, c) in p2.iter().enumerate() {
                        row[j] -= c;
                    }
                }
            }
            dnext.push(row);
        }
        p2 = std::mem::replace(&mut p1, next);
        d2 = std::mem::replace(&mut d1, dnext);
    }
    (p1, d1)
}

/// `∂ residual_i / ∂ x_m` as a dense row-major matrix with one row per
/// active order and one column per coupling.
pub fn residual_jacobian(
    squared_couplings: &[f64],
    target: &SymmetricSpectrum,
) -> Result<Vec<Vec<f64>>, InverseError> {
    check_dims(squared_couplings, target)?;
    let n = squared_couplings.len();
    let (_, grad) = coeffs_with_gradient(squared_couplings);
    Ok(active_orders(n)
        .into_iter()
        .map(|j| (0..n).map(|m| grad[m][j]).collect())
        .collect())
}
