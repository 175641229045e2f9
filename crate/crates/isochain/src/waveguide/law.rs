//! The exponential coupling law `Δ(d) = Δ(0) e^{−d/λ}` between corners a
//! distance `d` apart, and the embedding of a dimensionless spectrum into
//! the window below threshold.

use super::{DesignError, GuideParams};
use crate::spectral::{ChainCouplings, SymmetricSpectrum};

/// `d_n = λ ln(Δ(0) / (s F_n))`.
pub fn couplings_to_segments(
    couplings: &ChainCouplings,
    params: &GuideParams,
    scale: f64,
) -> Result<Vec<f64>, DesignError> {
    params.validate()?;
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(DesignError::InvalidParams(format!("scale must be positive, got {scale}")));
    }
    let cap = params.coupling_cap();
    let largest = couplings.max();
    if scale * largest > cap * (1.0 + 1e-12) {
        return Err(DesignError::WindowViolation { scale, max_scale: cap / largest });
    }
    Ok(couplings
        .values()
        .iter()
        .map(|f| (params.lambda * (params.delta0 / (scale * f)).ln()).max(params.d_min))
        .collect())
}

/// `F_n = Δ(0) e^{−d_n/λ} / s`.
pub fn segments_to_couplings(
    segments: &[f64],
    params: &GuideParams,
    scale: f64,
) -> Result<ChainCouplings, DesignError> {
    params.validate()?;
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(DesignError::InvalidParams(format!("scale must be positive, got {scale}")));
    }
    let values = segments.iter().map(|d| params.delta0 * (-d / params.lambda).exp() / scale).collect();
    Ok(ChainCouplings::new(values)?)
}

/// A dimensionless spectrum placed in the window around `E_b`.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    /// Energy per unit of dimensionless coupling.
    pub scale: f64,
    /// `E_b + s E_k`.
    pub levels: Vec<f64>,
    /// True when the segment-length floor, not the window, fixed `scale`.
    pub capped: bool,
}

/// Chooses `s = safety · min(E_b, E_t − E_b) / max|E_k|`, lowered further if
/// the largest coupling of `couplings` would need a segment shorter than
/// `d_min`.
pub fn embed_spectrum(
    target: &SymmetricSpectrum,
    couplings: Option<&ChainCouplings>,
    params: &GuideParams,
) -> Result<Embedding, DesignError> {
    params.validate()?;
    let rho = target.max_abs();
    if !(rho > 0.0) {
        return Err(DesignError::DegenerateTarget);
    }
    let window = params.bound.min(params.threshold() - params.bound);
    let mut scale = params.safety * window / rho;
    let mut capped = false;
    if let Some(c) = couplings {
        let limit = params.coupling_cap() / c.max();
        if limit < scale {
            scale = limit;
            capped = true;
        }
    }
    let levels = target.values().iter().map(|e| params.bound + scale * e).collect();
    Ok(Embedding { scale, levels, capped })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn chain(v: &[f64]) -> ChainCouplings {
        ChainCouplings::new(v.to_vec()).unwrap()
    }

    #[test]
    fn law_examples() {
        let p = GuideParams { d_min: 0.0, ..GuideParams::default() };
        let s = 0.5;
        let d = couplings_to_segments(&chain(&[p.delta0 / s]), &p, s).unwrap();
        assert!(d[0].abs() < 1e-14);
        let d = couplings_to_segments(&chain(&[p.delta0 * (-1f64).exp() / s]), &p, s).unwrap();
        assert!((d[0] - p.lambda).abs() < 1e-14);
        let d = couplings_to_segments(&chain(&[0.2, 0.1]), &p, s).unwrap();
        assert!((d[1] - d[0] - p.lambda * 2f64.ln()).abs() < 1e-13);
    }

    #[test]
    fn forward_examples() {
        let p = GuideParams::default();
        let f = segments_to_couplings(&[p.lambda, p.lambda], &p, 2.0).unwrap();
        let expected = p.delta0 / 2.0 * (-1f64).exp();
        assert!(f.values().iter().all(|v| (v - expected).abs() < 1e-15 * expected.max(1.0)));
    }

    #[test]
    fn dirac_dimer_distances_follow_log_sqrt() {
        let p = GuideParams::default();
        let d0 = 3.0;
        let d: Vec<f64> = (1..=5).map(|k| d0 - p.lambda * (k as f64).sqrt().ln()).collect();
        let f = segments_to_couplings(&d, &p, 1.0).unwrap();
        for (k, v) in f.values().iter().enumerate() {
            let ratio = v / f.values()[0];
            assert!((ratio - ((k + 1) as f64).sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn window_violation_reports_max_scale() {
        let p = GuideParams::default();
        let c = chain(&[1.0, 2.0]);
        let cap = p.coupling_cap();
        match couplings_to_segments(&c, &p, cap) {
            Err(DesignError::WindowViolation { max_scale, .. }) => assert!((max_scale - cap / 2.0).abs() < 1e-14),
            other => panic!("{other:?}"),
        }
        let d = couplings_to_segments(&c, &p, cap / 2.0).unwrap();
        assert!((d[1] - p.d_min).abs() < 1e-12);
    }

    #[test]
    fn embedding_examples() {
        let p = GuideParams::default();
        let t = SymmetricSpectrum::new(vec![-1.0, 0.0, 1.0]).unwrap();
        let e = embed_spectrum(&t, None, &p).unwrap();
        assert!((p.threshold() - 9.8696).abs() < 1e-4);
        assert!((p.bound - 9.1787).abs() < 1e-4);
        assert!((e.scale - 0.6218).abs() < 1e-4);
        assert!(e.levels.iter().all(|&l| l > 0.0 && l < p.threshold()));
        assert!(!e.capped);
        let zero = SymmetricSpectrum::new(vec![0.0, 0.0]).unwrap();
        assert!(matches!(embed_spectrum(&zero, None, &p), Err(DesignError::DegenerateTarget)));
    }

    #[test]
    fn embedding_respects_coupling_cap() {
        // with d_min = L the window always binds first
        let p = GuideParams { d_min: 3.0, ..GuideParams::default() };
        let c = chain(&[5.0, 5.0]);
        let t = crate::spectral::eig_jacobi(&c).spectrum;
        let e = embed_spectrum(&t, Some(&c), &p).unwrap();
        assert!(e.capped);
        assert!(e.scale * c.max() <= p.coupling_cap() * (1.0 + 1e-12));
        couplings_to_segments(&c, &p, e.scale).unwrap();
    }

    #[test]
    fn finite_oscillator_embedding_is_inside_the_window() {
        use crate::models::{model_couplings, ModelKind};
        let p = GuideParams::default();
        let c = model_couplings(&ModelKind::FiniteOscillator { sites: 7 }).unwrap();
        let t = crate::spectral::eig_jacobi(&c).spectrum;
        let e = embed_spectrum(&t, Some(&c), &p).unwrap();
        let window = p.threshold() - p.bound;
        assert_eq!(e.levels.len(), 7);
        assert!(e.levels.iter().all(|&l| (l - p.bound).abs() < 0.9 * window + 1e-12));
        let gaps: Vec<f64> = e.levels.windows(2).map(|w| w[1] - w[0]).collect();
        assert!(gaps.iter().all(|g| (g - gaps[0]).abs() < 1e-9));
    }

    proptest! {
        #[test]
        fn round_trip_and_monotone(f in prop::collection::vec(0.05f64..1.0, 1..12), s in 0.1f64..1.0) {
            let p = GuideParams { d_min: 0.0, ..GuideParams::default() };
            let c = ChainCouplings::new(f.clone()).unwrap();
            let s = s * p.coupling_cap() / c.max();
            let d = couplings_to_segments(&c, &p, s).unwrap();
            let back = segments_to_couplings(&d, &p, s).unwrap();
            for (a, b) in back.values().iter().zip(&f) {
                prop_assert!((a - b).abs() <= 1e-12 * b);
            }
            for i in 0..f.len() {
                for j in 0..f.len() {
                    if f[i] > f[j] {
                        prop_assert!(d[i] < d[j]);
                    }
                }
            }
        }
    }
}
