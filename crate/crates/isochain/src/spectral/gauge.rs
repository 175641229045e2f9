use num_complex::Complex64;

use super::{ChainCouplings, SpectralError};

/// Result of removing the phases from complex couplings.
#[derive(Debug, Clone)]
pub struct GaugeReduction {
    pub couplings: ChainCouplings,
    /// Accumulated site phases `Δ_1..Δ_{N+1}` with `Δ_1 = 0` and
    /// `Δ_{n+1} = Δ_n + arg F_n`.
    pub phases: Vec<f64>,
}

impl GaugeReduction {
    /// Maps an eigenvector of the complex chain to the matching eigenvector
    /// of the modulus chain: `ψ_n = e^{iΔ_n} φ_n`.
    pub fn to_real_gauge(&self, phi: &[Complex64]) -> Vec<Complex64> {
        phi.iter().zip(&self.phases).map(|(p, &d)| p * Complex64::from_polar(1.0, d)).collect()
    }

    /// Inverse of [`Self::to_real_gauge`].
    pub fn from_real_gauge(&self, psi: &[Complex64]) -> Vec<Complex64> {
        psi.iter().zip(&self.phases).map(|(p, &d)| p * Complex64::from_polar(1.0, -d)).collect()
    }
}

/// Splits complex couplings `F_n = e^{iδ_n}|F_n|` into moduli and the site
/// phases that conjugate one model into the other. The complex chain has
/// `H_{n,n+1} = F_n`, `H_{n+1,n} = F_n*`.
pub fn gauge_reduce(complex_couplings: &[Complex64]) -> Result<GaugeReduction, SpectralError> {
    let mut phases = Vec::with_capacity(complex_couplings.len() + 1);
    let mut moduli = Vec::with_capacity(complex_couplings.len());
    let mut acc = 0.0;
    phases.push(acc);
    for (i, f) in complex_couplings.iter().enumerate() {
        let modulus = f.norm();
        if !modulus.is_finite() {
            return Err(SpectralError::NonFiniteCoupling { index: i + 1 });
        }
        if modulus == 0.0 {
            return Err(SpectralError::NonPositiveCoupling { index: i + 1, value: 0.0 });
        }
        moduli.push(modulus);
        acc += f.arg();
        phases.push(acc);
    }
    Ok(GaugeReduction { couplings: ChainCouplings::new(moduli)?, phases })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::eig_jacobi;
    use nalgebra::DMatrix;
    use std::f64::consts::PI;

    fn hermitian_chain(f: &[Complex64]) -> DMatrix<Complex64> {
        let n = f.len() + 1;
        let mut h = DMatrix::zeros(n, n);
        for (i, c) in f.iter().enumerate() {
            h[(i, i + 1)] = *c;
            h[(i + 1, i)] = c.conj();
        }
        h
    }

    #[test]
    fn phases_accumulate() {
        let f = [Complex64::new(1.0, 0.0), Complex64::from_polar(1.0, PI / 3.0)];
        let g = gauge_reduce(&f).unwrap();
        assert!((g.couplings.values()[0] - 1.0).abs() < 1e-15);
        assert!((g.couplings.values()[1] - 1.0).abs() < 1e-15);
        assert_eq!(g.phases.len(), 3);
        assert_eq!(g.phases[0], 0.0);
        assert_eq!(g.phases[1], 0.0);
        assert!((g.phases[2] - PI / 3.0).abs() < 1e-15);
    }

    #[test]
    fn real_positive_untouched() {
        let f: Vec<Complex64> = [0.5, 2.0, 1.5].iter().map(|&r| Complex64::new(r, 0.0)).collect();
        let g = gauge_reduce(&f).unwrap();
        assert_eq!(g.couplings.values(), &[0.5, 2.0, 1.5]);
        assert!(g.phases.iter().all(|&p| p == 0.0));
    }

    #[test]
    fn imaginary_couplings_dense_oracle() {
        let f = [Complex64::i(), Complex64::i()];
        let g = gauge_reduce(&f).unwrap();
        assert_eq!(g.couplings.values(), &[1.0, 1.0]);
        let mut dense: Vec<f64> =
            hermitian_chain(&f).symmetric_eigen().eigenvalues.iter().copied().collect();
        dense.sort_by(f64::total_cmp);
        let r2 = 2f64.sqrt();
        for (a, b) in dense.iter().zip([-r2, 0.0, r2]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn phase_map_carries_eigenvectors() {
        let f = [
            Complex64::from_polar(0.8, 0.4),
            Complex64::from_polar(1.3, -2.0),
            Complex64::from_polar(0.5, 2.9),
        ];
        let g = gauge_reduce(&f).unwrap();
        let eig = eig_jacobi(&g.couplings);
        let h = hermitian_chain(&f);
        for k in 0..4 {
            let psi: Vec<Complex64> = eig.vector(k).iter().map(|&v| Complex64::new(v, 0.0)).collect();
            let phi = nalgebra::DVector::from_vec(g.from_real_gauge(&psi));
            let r = &h * &phi - phi.scale(eig.energy(k));
            assert!(r.norm() < 1e-12);
        }
    }

    #[test]
    fn zero_modulus_rejected() {
        assert!(gauge_reduce(&[Complex64::new(0.0, 0.0)]).is_err());
    }
}
