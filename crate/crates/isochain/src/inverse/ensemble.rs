use rand::Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::surface::sample_surface;
use super::InverseError;
use crate::rng;
use crate::spectral::SymmetricSpectrum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnsembleKind {
    /// `E = cos θ` with `θ` uniform on `(0, π/2)`, mirrored: the level
    /// density of a periodic chain with `F = 1/2`.
    #[serde(alias = "cosine-band")]
    Cosine,
    /// Half-normal magnitudes of width `σ`, mirrored.
    #[serde(alias = "gaussian-band")]
    Gaussian,
}

impl std::str::FromStr for EnsembleKind {
    type Err = InverseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cosine" | "cosine-band" => Ok(Self::Cosine),
            "gaussian" | "gaussian-band" => Ok(Self::Gaussian),
            other => Err(InverseError::InvalidEnsemble(format!("unknown kind {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSpec {
    pub kind: EnsembleKind,
    /// Number of levels `N + 1`.
    pub size: usize,
    pub sigma: f64,
    pub trials: usize,
    pub seed: u64,
    pub bins: usize,
}

impl EnsembleSpec {
    pub fn new(kind: EnsembleKind) -> Self {
        Self { kind, size: 12, sigma: 0.28, trials: 500, seed: rng::DEFAULT_SEED, bins: 21 }
    }

    pub fn validate(&self) -> Result<(), InverseError> {
        if self.size < 2 {
            return Err(InverseError::InvalidEnsemble(format!("size must be at least 2, got {}", self.size)));
        }
        if self.trials == 0 {
            return Err(InverseError::InvalidEnsemble("trials must be at least 1".into()));
        }
        if self.bins == 0 {
            return Err(InverseError::InvalidEnsemble("bins must be at least 1".into()));
        }
        if self.kind == EnsembleKind::Gaussian && !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(InverseError::InvalidEnsemble(format!("sigma must be positive, got {}", self.sigma)));
        }
        Ok(())
    }
}

/// The first spectrum of the ensemble stream.
pub fn random_spectrum(spec: &EnsembleSpec) -> Result<SymmetricSpectrum, InverseError> {
    spec.validate()?;
    Ok(trial_spectrum(spec, 0))
}

fn trial_spectrum(spec: &EnsembleSpec, trial: u64) -> SymmetricSpectrum {
    let mut rng = rng::stream(spec.seed, "ensemble-spectrum", trial);
    let half = spec.size / 2;
    let mut mags: Vec<f64> = match spec.kind {
        EnsembleKind::Cosine => (0..half)
            .map(|_| {
                let theta = loop {
                    let t: f64 = rng.random_range(0.0..std::f64::consts::FRAC_PI_2);
                    if t > 0.0 {
                        break t;
                    }
                };
                theta.cos()
            })
            .collect(),
        EnsembleKind::Gaussian => {
            let normal = Normal::new(0.0, spec.sigma).expect("validated sigma");
            (0..half)
                .map(|_| loop {
                    let v: f64 = normal.sample(&mut rng);
                    if v != 0.0 {
                        break v.abs();
                    }
                })
                .collect()
        }
    };
    mags.sort_by(f64::total_cmp);
    SymmetricSpectrum::from_positive(&mags, spec.size % 2 == 1).expect("finite positive magnitudes")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    /// `bins + 1` ascending edges.
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

impl Histogram {
    /// Equal-width bins over `[0, max(values)]`; the top edge is inclusive.
    pub fn from_values(values: &[f64], bins: usize) -> Self {
        let top = values.iter().fold(0.0f64, |m, v| m.max(*v));
        let top = if top > 0.0 { top } else { 1.0 };
        let width = top / bins as f64;
        let edges = (0..=bins).map(|i| if i == bins { top } else { i as f64 * width }).collect();
        let mut counts = vec![0u64; bins];
        for &v in values {
            let i = ((v / width) as usize).min(bins - 1);
            counts[i] += 1;
        }
        Self { edges, counts }
    }

    /// Center of the fullest bin (first one on ties).
    pub fn mode(&self) -> f64 {
        let mut best = 0;
        for (i, &c) in self.counts.iter().enumerate() {
            if c > self.counts[best] {
                best = i;
            }
        }
        0.5 * (self.edges[best] + self.edges[best + 1])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CouplingStats {
    pub histogram: Histogram,
    pub mean: f64,
    pub std_dev: f64,
    pub mode: f64,
    /// Pooled couplings over all successful trials.
    pub samples: usize,
    pub failed_trials: usize,
}

/// Pools the couplings of one surface point per random spectrum.
pub fn coupling_distribution(spec: &EnsembleSpec) -> Result<CouplingStats, InverseError> {
    spec.validate()?;
    let pooled: Vec<Option<Vec<f64>>> = (0..spec.trials as u64)
        .into_par_iter()
        .map(|t| {
            let target = trial_spectrum(spec, t);
            let seed = rng::derive_seed(spec.seed, "ensemble-surface", t);
            sample_surface(&target, 1, seed).ok().and_then(|mut s| s.pop()).map(|c| c.into_values())
        })
        .collect();
    let failed = pooled.iter().filter(|p| p.is_none()).count();
    if 2 * failed > spec.trials {
        return Err(InverseError::TooManySkipped { skipped: failed, requested: spec.trials });
    }
    let values: Vec<f64> = pooled.into_iter().flatten().flatten().collect();
    let count = values.len() as f64;
    let mean = values.iter().sum::<f64>() / count;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / count;
    let histogram = Histogram::from_values(&values, spec.bins);
    Ok(CouplingStats {
        mode: histogram.mode(),
        histogram,
        mean,
        std_dev: var.sqrt(),
        samples: values.len(),
        failed_trials: failed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(kind: EnsembleKind, size: usize) -> EnsembleSpec {
        EnsembleSpec { size, ..EnsembleSpec::new(kind) }
    }

    #[test]
    fn two_levels_cosine() {
        let s = random_spectrum(&spec(EnsembleKind::Cosine, 2)).unwrap();
        let v = s.values();
        assert_eq!(v.len(), 2);
        assert!(v[1] > 0.0 && v[1] < 1.0 && v[0] == -v[1]);
    }

    #[test]
    fn odd_size_has_one_zero() {
        for kind in [EnsembleKind::Cosine, EnsembleKind::Gaussian] {
            let s = random_spectrum(&spec(kind, 5)).unwrap();
            assert_eq!(s.values().iter().filter(|&&e| e == 0.0).count(), 1);
        }
    }

    #[test]
    fn cosine_levels_follow_arcsine_law() {
        // pooled positive levels have CDF (2/π) arcsin(E) on (0, 1)
        let sp = EnsembleSpec { trials: 1, ..spec(EnsembleKind::Cosine, 2) };
        let mut draws: Vec<f64> = (0..10_000).map(|t| trial_spectrum(&sp, t).values()[1]).collect();
        draws.sort_by(f64::total_cmp);
        let n = draws.len() as f64;
        let ks = draws.iter().enumerate().fold(0.0f64, |m, (i, &e)| {
            let cdf = 2.0 / std::f64::consts::PI * e.asin();
            m.max((cdf - i as f64 / n).abs()).max((cdf - (i + 1) as f64 / n).abs())
        });
        assert!(ks < 0.02, "KS = {ks}");
    }

    #[test]
    fn deterministic() {
        let s = spec(EnsembleKind::Gaussian, 8);
        assert_eq!(random_spectrum(&s).unwrap(), random_spectrum(&s).unwrap());
    }

    #[test]
    fn single_trial_single_bin() {
        let sp = EnsembleSpec { trials: 1, size: 2, ..EnsembleSpec::new(EnsembleKind::Cosine) };
        let stats = coupling_distribution(&sp).unwrap();
        assert_eq!(stats.histogram.counts.iter().filter(|&&c| c > 0).count(), 1);
        assert_eq!(stats.samples, 1);
        let e = random_spectrum(&sp).unwrap().values()[1];
        assert!((stats.mean - e).abs() < 1e-14);
    }

    #[test]
    fn histogram_edges_and_mode() {
        let h = Histogram::from_values(&[0.1, 0.2, 0.25, 1.0], 4);
        assert_eq!(h.counts, vec![2, 1, 0, 1]);
        assert!((h.mode() - 0.125).abs() < 1e-15);
    }

    #[test]
    fn validation() {
        assert!(EnsembleSpec { size: 1, ..EnsembleSpec::new(EnsembleKind::Cosine) }.validate().is_err());
        assert!(EnsembleSpec { sigma: 0.0, ..EnsembleSpec::new(EnsembleKind::Gaussian) }.validate().is_err());
        assert!("triangle".parse::<EnsembleKind>().is_err());
    }
}
