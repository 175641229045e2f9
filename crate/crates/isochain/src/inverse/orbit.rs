//! Isospectral orbits through the lateral factorization `H = A H₀ A`.
//!
//! `H₀` is the unit chain and `A = diag(A_1..A_{N+1})` with
//! `A_n A_{n+1} = F_n`. Any unitary `X` commuting with `H₀` is diagonal in
//! the unit-chain eigenbasis, `X = Σ_k e^{-iα_k} |k⟩⟨k|`. When
//! `G = X† A² X` is again diagonal, `Ã = √diag(G)` defines a chain
//! `F̃_n = Ã_n Ã_{n+1}` unitarily equivalent to the source. Which `α` keep
//! `G` diagonal depends on `A`; [`scan_admissible`] looks for them on a grid.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::InverseError;
use crate::spectral::{unit_chain_basis, ChainCouplings};

#[derive(Debug, Clone, PartialEq)]
pub struct LateralFactor {
    pub entries: Vec<f64>,
}

impl LateralFactor {
    pub fn couplings(&self) -> Result<ChainCouplings, InverseError> {
        let f = self.entries.windows(2).map(|w| (w[0] * w[1]).abs()).collect();
        Ok(ChainCouplings::new(f)?)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitPhases {
    /// `α_1..α_{N+1}` in radians, `k = 1` being the highest unit-chain level.
    pub alpha: Vec<f64>,
}

/// `A_1 = a1`, `A_{n+1} = F_n / A_n`.
pub fn lateral_factor(couplings: &ChainCouplings, a1: f64) -> Result<LateralFactor, InverseError> {
    if a1 == 0.0 || !a1.is_finite() {
        return Err(InverseError::ZeroFactor);
    }
    let mut entries = Vec::with_capacity(couplings.sites());
    entries.push(a1);
    for &f in couplings.values() {
        let last = *entries.last().unwrap_or(&a1);
        entries.push(f / last);
    }
    Ok(LateralFactor { entries })
}

/// `X = Σ_k e^{-iα_k} |k⟩⟨k|` in the site basis.
pub fn build_x(phases: &OrbitPhases) -> DMatrix<Complex64> {
    let size = phases.alpha.len();
    if size == 0 {
        return DMatrix::zeros(0, 0);
    }
    let basis = unit_chain_basis(size - 1);
    let w: Vec<Complex64> = phases.alpha.iter().map(|&a| Complex64::from_polar(1.0, -a)).collect();
    DMatrix::from_fn(size, size, |n, m| {
        (0..size).map(|k| w[k] * (basis[n][k] * basis[m][k])).sum::<Complex64>()
    })
}

/// Image of `factor` under the orbit action, or `None` when `α` is not
/// admissible for it (largest off-diagonal `|G|` above `tol` times the
/// largest diagonal entry).
pub fn orbit_map(
    factor: &LateralFactor,
    phases: &OrbitPhases,
    tol: f64,
) -> Result<Option<ChainCouplings>, InverseError> {
    Ok(orbit_image(factor, phases, tol)?.map(|(_, c)| c))
}

fn orbit_image(
    factor: &LateralFactor,
    phases: &OrbitPhases,
    tol: f64,
) -> Result<Option<(LateralFactor, ChainCouplings)>, InverseError> {
    let size = factor.entries.len();
    if phases.alpha.len() != size {
        return Err(InverseError::DimensionMismatch { couplings: size.saturating_sub(1), levels: phases.alpha.len() });
    }
    let x = build_x(phases);
    let d = DMatrix::from_fn(size, size, |i, j| {
        if i == j {
            Complex64::new(factor.entries[i] * factor.entries[i], 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let g = x.adjoint() * d * &x;
    let mut diag_max = 0.0f64;
    let mut off_max = 0.0f64;
    for i in 0..size {
        for j in 0..size {
            if i == j {
                diag_max = diag_max.max(g[(i, i)].re.abs());
            } else {
                off_max = off_max.max(g[(i, j)].norm());
            }
        }
    }
    if off_max > tol * diag_max {
        return Ok(None);
    }
    let mut moduli = Vec::with_capacity(size);
    for i in 0..size {
        let v = g[(i, i)].re;
        if v <= 0.0 {
            return Err(InverseError::NegativeDiagonal { index: i + 1, value: v });
        }
        moduli.push(v.sqrt());
    }
    let image = LateralFactor { entries: moduli };
    let couplings = image.couplings()?;
    Ok(Some((image, couplings)))
}

/// Violations of the two orbit invariants, both relative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitInvariants {
    /// `|∏|Ã_n|² − ∏|A_n|²| / ∏|A_n|²`.
    pub product: f64,
    /// Largest `| |B_{kk'}|² − |B̃_{kk'}|² |` over level pairs, with
    /// `B = Σ_n |A_n|² ⟨k|n⟩⟨n|k'⟩`, divided by `(max|A|²)²`.
    pub mixed_moduli: f64,
}

impl OrbitInvariants {
    pub fn max(&self) -> f64 {
        self.product.max(self.mixed_moduli)
    }
}

pub fn orbit_invariants(source: &LateralFactor, image: &LateralFactor) -> Result<OrbitInvariants, InverseError> {
    let size = source.entries.len();
    if image.entries.len() != size {
        return Err(InverseError::DimensionMismatch { couplings: image.entries.len(), levels: size });
    }
    if size == 0 {
        return Ok(OrbitInvariants { product: 0.0, mixed_moduli: 0.0 });
    }
    let a2: Vec<f64> = source.entries.iter().map(|a| a * a).collect();
    let b2: Vec<f64> = image.entries.iter().map(|a| a * a).collect();
    let pa: f64 = a2.iter().product();
    let pb: f64 = b2.iter().product();
    let product = (pb - pa).abs() / pa.abs();
    let basis = unit_chain_basis(size - 1);
    let mixed = |w: &[f64], k: usize, kp: usize| -> f64 {
        (0..size).map(|n| w[n] * basis[n][k] * basis[n][kp]).sum::<f64>().powi(2)
    };
    let scale = a2.iter().fold(0.0f64, |m, v| m.max(*v)).powi(2);
    let mut worst = 0.0f64;
    for k in 0..size {
        for kp in 0..size {
            worst = worst.max((mixed(&a2, k, kp) - mixed(&b2, k, kp)).abs());
        }
    }
    Ok(OrbitInvariants { product, mixed_moduli: worst / scale })
}

/// One admissible phase vector and its image.
#[derive(Debug, Clone)]
pub struct AdmissiblePoint {
    pub phases: OrbitPhases,
    pub couplings: ChainCouplings,
    pub image: LateralFactor,
}

/// Largest number of grid points [`scan_admissible`] will visit.
pub const MAX_SCAN_POINTS: usize = 1 << 20;

/// Grid scan over `α_2..α_{N+1} ∈ {2πj/steps}` with `α_1 = 0` (a global
/// phase acts trivially). Returns every admissible grid point.
pub fn scan_admissible(factor: &LateralFactor, steps: usize, tol: f64) -> Result<Vec<AdmissiblePoint>, InverseError> {
    let size = factor.entries.len();
    if size == 0 || steps == 0 {
        return Ok(Vec::new());
    }
    let free = size - 1;
    let total = (steps as u128).checked_pow(free as u32).unwrap_or(u128::MAX);
    if total > MAX_SCAN_POINTS as u128 {
        return Err(InverseError::ScanTooLarge { points: total.min(usize::MAX as u128) as usize, max: MAX_SCAN_POINTS });
    }
    let step = std::f64::consts::TAU / steps as f64;
    let mut found = Vec::new();
    let mut digits = vec![0usize; free];
    for _ in 0..total {
        let mut alpha = vec![0.0];
        alpha.extend(digits.iter().map(|&d| d as f64 * step));
        let phases = OrbitPhases { alpha };
        if let Some((image, couplings)) = orbit_image(factor, &phases, tol)? {
            found.push(AdmissiblePoint { phases, couplings, image });
        }
        for d in digits.iter_mut() {
            *d += 1;
            if *d < steps {
                break;
            }
            *d = 0;
        }
    }
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::eig_jacobi;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn chain(v: &[f64]) -> ChainCouplings {
        ChainCouplings::new(v.to_vec()).unwrap()
    }

    fn spectra_match(a: &ChainCouplings, b: &ChainCouplings) -> f64 {
        let ea = eig_jacobi(a).spectrum;
        let eb = eig_jacobi(b).spectrum;
        ea.values().iter().zip(eb.values()).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
    }

    #[test]
    fn factor_examples() {
        let f = lateral_factor(&chain(&[0.8, 0.8]), 2.0).unwrap();
        assert_eq!(f.entries, vec![2.0, 0.4, 2.0]);
        assert_eq!(lateral_factor(&chain(&[]), 1.5).unwrap().entries, vec![1.5]);
        assert_eq!(lateral_factor(&chain(&[1.0, 2.0, 6.0]), 1.0).unwrap().entries, vec![1.0, 1.0, 2.0, 3.0]);
        assert!(lateral_factor(&chain(&[1.0]), 0.0).is_err());
    }

    #[test]
    fn constant_phase_is_scalar() {
        let x = build_x(&OrbitPhases { alpha: vec![0.3; 4] });
        let w = Complex64::from_polar(1.0, -0.3);
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == j { w } else { Complex64::new(0.0, 0.0) };
                assert!((x[(i, j)] - expect).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn two_site_sign_flip_is_swap() {
        let x = build_x(&OrbitPhases { alpha: vec![0.0, PI] });
        assert!(x[(0, 0)].norm() < 1e-15 && x[(1, 1)].norm() < 1e-15);
        assert!((x[(0, 1)] - 1.0).norm() < 1e-15 && (x[(1, 0)] - 1.0).norm() < 1e-15);
    }

    #[test]
    fn x_commutes_with_unit_chain() {
        let alpha = vec![0.1, 1.7, -0.4, 2.9, 0.6];
        let x = build_x(&OrbitPhases { alpha });
        let h0 = DMatrix::from_fn(5, 5, |i, j| {
            Complex64::new(if i.abs_diff(j) == 1 { 1.0 } else { 0.0 }, 0.0)
        });
        let unit = &x * x.adjoint() - DMatrix::identity(5, 5);
        assert!(unit.iter().all(|v| v.norm() < 1e-12));
        let comm = &x * &h0 * x.adjoint() - &h0;
        assert!(comm.iter().all(|v| v.norm() < 1e-10));
    }

    #[test]
    fn constant_alpha_fixes_chain() {
        let c = chain(&[0.4, 1.2, 0.9]);
        let a = lateral_factor(&c, 0.7).unwrap();
        let img = orbit_map(&a, &OrbitPhases { alpha: vec![1.1; 4] }, 1e-10).unwrap().unwrap();
        for (x, y) in img.values().iter().zip(c.values()) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn two_sites_admit_only_multiples_of_pi() {
        let c = chain(&[0.9]);
        let a = lateral_factor(&c, 1.3).unwrap();
        assert!(orbit_map(&a, &OrbitPhases { alpha: vec![0.0, 0.7] }, 1e-10).unwrap().is_none());
        let flip = orbit_map(&a, &OrbitPhases { alpha: vec![0.0, PI] }, 1e-10).unwrap().unwrap();
        assert!((flip.values()[0] - 0.9).abs() < 1e-12);
        // equal moduli: every α works and the coupling stays put
        let s = lateral_factor(&c, 0.9f64.sqrt()).unwrap();
        for d in [0.3, 1.0, 2.2] {
            let img = orbit_map(&s, &OrbitPhases { alpha: vec![0.0, d] }, 1e-10).unwrap().unwrap();
            assert!((img.values()[0] - 0.9).abs() < 1e-12);
        }
    }

    #[test]
    fn reflection_reverses_chain() {
        let c = chain(&[0.4, 1.2, 0.9, 2.0]);
        let a = lateral_factor(&c, 0.8).unwrap();
        let alpha = (0..5).map(|k| if k % 2 == 1 { PI } else { 0.0 }).collect();
        let img = orbit_map(&a, &OrbitPhases { alpha }, 1e-10).unwrap().unwrap();
        let mut rev = c.values().to_vec();
        rev.reverse();
        for (x, y) in img.values().iter().zip(&rev) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn scan_finds_isospectral_images() {
        let c = chain(&[1.0, 1.0]);
        let a = lateral_factor(&c, 1.4).unwrap();
        let found = scan_admissible(&a, 8, 1e-10).unwrap();
        assert!(found.len() >= 2);
        for p in &found {
            let x = p.couplings.squares();
            assert!((x[0] + x[1] - 2.0).abs() < 1e-10);
            assert!(orbit_invariants(&a, &p.image).unwrap().max() < 1e-8);
        }
    }

    #[test]
    fn invariants_flag_perturbation() {
        let a = lateral_factor(&chain(&[0.5, 1.5, 0.7]), 1.0).unwrap();
        assert_eq!(orbit_invariants(&a, &a).unwrap().max(), 0.0);
        let mut b = a.clone();
        b.entries[2] *= 1.1;
        let inv = orbit_invariants(&a, &b).unwrap();
        assert!((inv.product - 0.21).abs() < 1e-12);
    }

    #[test]
    fn scan_size_capped() {
        let a = lateral_factor(&ChainCouplings::uniform(12, 1.0).unwrap(), 1.0).unwrap();
        assert!(matches!(scan_admissible(&a, 16, 1e-10), Err(InverseError::ScanTooLarge { .. })));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn orbit_images_are_isospectral(
            f in prop::collection::vec(0.3f64..2.0, 1..=4),
            a1 in 0.3f64..2.0,
        ) {
            let c = chain(&f);
            let a = lateral_factor(&c, a1).unwrap();
            for p in scan_admissible(&a, 4, 1e-10).unwrap() {
                prop_assert!(spectra_match(&c, &p.couplings) <= 1e-8);
                prop_assert!(orbit_invariants(&a, &p.image).unwrap().max() <= 1e-8);
            }
        }
    }
}
