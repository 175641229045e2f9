//! Characteristic-polynomial coefficients.
//!
//! With `λ = -E`, `Φ_N(λ) = det(H + λ)` obeys the three-term recurrence in
//! the chain length
//!
//! ```text
//! Φ_N(λ) = λ Φ_{N-1}(λ) - F_N² Φ_{N-2}(λ),   Φ_{-1} = 1,  Φ_0 = λ,
//! ```
//!
//! so the coefficients satisfy `Λ_N^j = Λ_{N-1}^{j-1} - F_N² Λ_{N-2}^j`.
//! Three routes are provided and checked against each other in tests:
//! the lattice recurrence, the fully unrolled multi-index sum, and the
//! expansion of `∏(λ + E_k)` over a spectrum.

use super::{CharPolyCoeffs, ChainCouplings, SpectralError, SymmetricSpectrum};

/// Largest chain index accepted by [`charpoly_coeffs_closed`].
pub const CLOSED_FORM_MAX_N: usize = 14;

/// Coefficients by the `O(N²)` lattice recurrence.
pub fn charpoly_coeffs(couplings: &ChainCouplings) -> CharPolyCoeffs {
    CharPolyCoeffs::from_vec(coeffs_from_squares(&couplings.squares()))
}

/// The recurrence on squared couplings `x_n = F_n²`; `x` may hold any reals.
pub(crate) fn coeffs_from_squares(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    // prev2 = Φ_{m-2}, prev1 = Φ_{m-1}
    let mut prev2 = vec![1.0];
    let mut prev1 = vec![0.0, 1.0];
    for (m, &xm) in x.iter().enumerate() {
        let size = m + 3;
        let mut next = vec![0.0; size];
        for j in 1..size {
            next[j] = prev1[j - 1];
        }
        for (j, c) in prev2.iter().enumerate() {
            next[j] -= xm * c;
        }
        prev2 = std::mem::replace(&mut prev1, next);
    }
    debug_assert_eq!(prev1.len(), n + 2);
    prev1
}

/// `Λ_M^0` for the sub-chain `F_1..F_M` in closed form: zero for even `M`,
/// `(-1)^{(M+1)/2} ∏_{k=0}^{(M-1)/2} F²_{M-2k}` for odd `M`, and `Φ_{-1} = 1`.
fn constant_term(x: &[f64], m: isize) -> f64 {
    match m {
        -1 => 1.0,
        m if m < -1 || m % 2 == 0 => 0.0,
        m => {
            let pairs = (m + 1) / 2;
            let product: f64 = (0..pairs).map(|k| x[(m - 2 * k - 1) as usize]).product();
            if pairs % 2 == 0 {
                product
            } else {
                -product
            }
        }
    }
}

/// `Λ_N^j` as the explicit multi-index sum obtained by unrolling the
/// recurrence down to the constant terms.
///
/// Each level `k` of the nesting picks `n_k ≥ 0` factors
/// `F²_{M_k} F²_{M_k - 2} ⋯` with sign `(-1)^{n_k}` and descends to the
/// sub-chain of length `M_{k+1} = M_k - 2 n_k - 1` at one lower order; the
/// innermost level closes with the constant term. The cost grows
/// combinatorially, hence the size cap.
pub fn charpoly_coeffs_closed(couplings: &ChainCouplings, j: usize) -> Result<f64, SpectralError> {
    let n = couplings.len();
    if n > CLOSED_FORM_MAX_N {
        return Err(SpectralError::SizeLimit { n, max: CLOSED_FORM_MAX_N });
    }
    if j > n + 1 {
        return Err(SpectralError::OrderOutOfRange { j, n });
    }
    if (n + j) % 2 == 0 {
        // N - j even
        return Ok(0.0);
    }
    let x = couplings.squares();
    Ok(nested_sum(&x, n as isize, j))
}

fn nested_sum(x: &[f64], m: isize, order: usize) -> f64 {
    if order == 0 {
        return constant_term(x, m);
    }
    let order_i = order as isize;
    if order_i > m + 1 {
        return 0.0;
    }
    // Λ_m^{m+1} = 1 sits on the boundary of the lattice.
    if order_i == m + 1 {
        return 1.0;
    }
    let upper = (m - order_i + 1) / 2;
    let mut total = 0.0;
    let mut weight = 1.0;
    for nk in 0..=upper {
        if nk > 0 {
            weight *= -x[(m - 2 * (nk - 1) - 1) as usize];
        }
        total += weight * nested_sum(x, m - 2 * nk - 1, order - 1);
    }
    total
}

/// Coefficients of `∏_k (λ + E_k)` by incremental multiplication. The
/// coefficient of `λ^j` is the elementary symmetric polynomial
/// `e_{N+1-j}(E)`.
pub fn esp_from_spectrum(spectrum: &SymmetricSpectrum) -> CharPolyCoeffs {
    CharPolyCoeffs::from_vec(expand_roots(spectrum.values()))
}

/// Validating variant for raw energies.
pub fn esp_from_energies(energies: &[f64]) -> Result<CharPolyCoeffs, SpectralError> {
    let s = SymmetricSpectrum::new(energies.to_vec())?;
    Ok(esp_from_spectrum(&s))
}

pub(crate) fn expand_roots(energies: &[f64]) -> Vec<f64> {
    let mut poly = vec![1.0];
    for &e in energies {
        let mut next = vec![0.0; poly.len() + 1];
        for (j, c) in poly.iter().enumerate() {
            next[j + 1] += c;
            next[j] += e * c;
        }
        poly = next;
    }
    poly
}

/// Horner evaluation of `Σ_j Λ^j λ^j`.
pub fn charpoly_eval(coeffs: &CharPolyCoeffs, lambda: f64) -> f64 {
    coeffs.coeffs().iter().rev().fold(0.0, |acc, c| acc * lambda + c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::eig_jacobi;

    fn chain(v: &[f64]) -> ChainCouplings {
        ChainCouplings::new(v.to_vec()).unwrap()
    }

    /// Brute-force elementary symmetric polynomials by subset enumeration.
    fn esp_brute(e: &[f64], order: usize) -> f64 {
        let n = e.len();
        (0u32..1 << n)
            .filter(|mask| mask.count_ones() as usize == order)
            .map(|mask| (0..n).filter(|i| mask >> i & 1 == 1).map(|i| e[i]).product::<f64>())
            .sum()
    }

    #[test]
    fn unit_dimer_pair() {
        let c = charpoly_coeffs(&chain(&[1.0, 1.0]));
        assert_eq!(c.coeffs(), &[0.0, -2.0, 0.0, 1.0]);
        assert_eq!(charpoly_coeffs_closed(&chain(&[1.0, 1.0]), 1).unwrap(), -2.0);
    }

    #[test]
    fn single_site() {
        let c = charpoly_coeffs(&chain(&[]));
        assert_eq!(c.coeffs(), &[0.0, 1.0]);
        assert_eq!(charpoly_coeffs_closed(&chain(&[]), 1).unwrap(), 1.0);
        assert_eq!(charpoly_coeffs_closed(&chain(&[]), 0).unwrap(), 0.0);
    }

    #[test]
    fn matches_expanded_spectrum() {
        let f = chain(&[1.0, 2.0, 3.0]);
        let rec = charpoly_coeffs(&f);
        let eig = eig_jacobi(&f);
        let esp = esp_from_spectrum(&eig.spectrum);
        for j in 0..rec.coeffs().len() {
            assert!((rec[j] - esp[j]).abs() <= 1e-10, "j={j}: {} vs {}", rec[j], esp[j]);
        }
        // Λ^0 = F_1² F_3², Λ^2 = -(F_1²+F_2²+F_3²)
        assert_eq!(rec[0], 9.0);
        assert_eq!(rec[2], -14.0);
    }

    #[test]
    fn closed_form_matches_recurrence() {
        let f = chain(&[1.0, 2.0, 3.0, 4.0]);
        let rec = charpoly_coeffs(&f);
        for j in 0..=5 {
            let closed = charpoly_coeffs_closed(&f, j).unwrap();
            assert!((closed - rec[j]).abs() <= 1e-9 * rec[j].abs().max(1.0), "j={j}");
        }
    }

    #[test]
    fn parity_zeros() {
        for n in 0..8 {
            let f = chain(&(1..=n).map(|i| 0.3 + i as f64).collect::<Vec<_>>());
            let rec = charpoly_coeffs(&f);
            for j in 0..=n + 1 {
                if (n + j) % 2 == 0 {
                    assert_eq!(rec[j], 0.0);
                    assert_eq!(charpoly_coeffs_closed(&f, j).unwrap(), 0.0);
                }
            }
            assert_eq!(rec[n + 1], 1.0);
        }
    }

    #[test]
    fn closed_form_rejects_large_and_bad_orders() {
        let big = chain(&vec![1.0; CLOSED_FORM_MAX_N + 1]);
        assert!(matches!(charpoly_coeffs_closed(&big, 0), Err(SpectralError::SizeLimit { .. })));
        assert!(charpoly_coeffs_closed(&chain(&[1.0]), 3).is_err());
    }

    #[test]
    fn constant_term_closed_form() {
        // Λ_N^0 for odd N against the recurrence
        let f = chain(&[1.5, 0.7, 2.0, 1.1, 0.4]);
        let x = f.squares();
        for m in [1usize, 3, 5] {
            let rec = coeffs_from_squares(&x[..m]);
            assert!((constant_term(&x, m as isize) - rec[0]).abs() < 1e-12);
        }
        assert_eq!(constant_term(&x, 4), 0.0);
    }

    #[test]
    fn esp_examples() {
        let s = SymmetricSpectrum::new(vec![-1.0, 0.0, 1.0]).unwrap();
        assert_eq!(esp_from_spectrum(&s).coeffs(), &[0.0, -1.0, 0.0, 1.0]);
        let r2 = 2f64.sqrt();
        let s = SymmetricSpectrum::new(vec![-r2, 0.0, r2]).unwrap();
        let c = esp_from_spectrum(&s);
        assert!((c[1] + 2.0).abs() < 1e-15 && c[0] == 0.0 && c[3] == 1.0);
        let s = SymmetricSpectrum::new(vec![-2.0, -1.0, 1.0, 2.0]).unwrap();
        assert_eq!(esp_from_spectrum(&s).coeffs(), &[4.0, 0.0, -5.0, 0.0, 1.0]);
        assert!(esp_from_energies(&[-1.0, 0.3]).is_err());
    }

    #[test]
    fn esp_degree_bookkeeping() {
        // coefficient of λ^j is e_{N+1-j}, checked against subset enumeration
        let e = [-1.7, -0.9, -0.2, 0.2, 0.9, 1.7];
        let c = esp_from_energies(&e).unwrap();
        for j in 0..=6 {
            assert!((c[j] - esp_brute(&e, 6 - j)).abs() < 1e-12);
        }
    }

    #[test]
    fn horner() {
        let r2 = 2f64.sqrt();
        let c = CharPolyCoeffs::new(vec![0.0, -2.0, 0.0, 1.0]).unwrap();
        assert!(charpoly_eval(&c, r2).abs() < 1e-15);
        let c = CharPolyCoeffs::new(vec![0.0, -1.0, 0.0, 1.0]).unwrap();
        assert_eq!(charpoly_eval(&c, 2.0), 6.0);
        let c = CharPolyCoeffs::new(vec![4.0, 0.0, -5.0, 0.0, 1.0]).unwrap();
        assert_eq!(charpoly_eval(&c, 0.0), 4.0);
        assert!(CharPolyCoeffs::new(vec![1.0, 2.0]).is_err());
    }
}
