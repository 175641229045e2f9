//! Exactly solvable coupling families.
//!
//! | model | couplings `F_n` | spectrum |
//! |---|---|---|
//! | finite oscillator | `½√(n(N+1−n))` | `{−N/2, …, N/2}` |
//! | position chain | `√n` | `√2 ×` roots of `H_{N+1}` |
//! | Dirac oscillator | `m, g√1, m, g√2, …` | `E²` affine in the level index (lower half) |
//! | uniform | `c` | `2c cos(kπ/(N+2))` |

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fit::LinearFit;
use crate::spectral::{eig_jacobi, ChainCouplings, SpectralError, SymmetricSpectrum};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("a model chain needs at least 2 sites, got {0}")]
    TooFewSites(usize),
    #[error("a Dirac chain needs at least 1 dimer")]
    NoDimers,
    #[error("model parameter {name} = {value} must be positive")]
    NonPositive { name: &'static str, value: f64 },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModelKind {
    FiniteOscillator { sites: usize },
    PositionChain { sites: usize },
    /// `dimers` pairs of sites; `m` inside a dimer, `g√k` between dimers
    /// `k` and `k+1`.
    DiracOscillator { dimers: usize, m: f64, g: f64 },
    Uniform { sites: usize, c: f64 },
}

impl ModelKind {
    pub fn sites(&self) -> usize {
        match *self {
            Self::FiniteOscillator { sites } | Self::PositionChain { sites } | Self::Uniform { sites, .. } => sites,
            Self::DiracOscillator { dimers, .. } => 2 * dimers,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let positive = |name, value: f64| {
            if value > 0.0 && value.is_finite() {
                Ok(())
            } else {
                Err(ModelError::NonPositive { name, value })
            }
        };
        match *self {
            Self::DiracOscillator { dimers, m, g } => {
                if dimers == 0 {
                    return Err(ModelError::NoDimers);
                }
                positive("m", m)?;
                positive("g", g)
            }
            Self::Uniform { c, .. } => {
                positive("c", c)?;
                self.check_sites()
            }
            _ => self.check_sites(),
        }
    }

    fn check_sites(&self) -> Result<(), ModelError> {
        match self.sites() {
            s if s < 2 => Err(ModelError::TooFewSites(s)),
            _ => Ok(()),
        }
    }
}

pub fn model_couplings(kind: &ModelKind) -> Result<ChainCouplings, ModelError> {
    kind.validate()?;
    let n = kind.sites() - 1;
    let values: Vec<f64> = match *kind {
        ModelKind::FiniteOscillator { .. } => {
            (1..=n).map(|i| 0.5 * ((i * (n + 1 - i)) as f64).sqrt()).collect()
        }
        ModelKind::PositionChain { .. } => (1..=n).map(|i| (i as f64).sqrt()).collect(),
        ModelKind::DiracOscillator { m, g, .. } => {
            (1..=n).map(|i| if i % 2 == 1 { m } else { g * ((i / 2) as f64).sqrt() }).collect()
        }
        ModelKind::Uniform { c, .. } => vec![c; n],
    };
    Ok(ChainCouplings::new(values)?)
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExpectedSpectrum {
    /// Closed-form levels.
    Exact(SymmetricSpectrum),
    /// `√2 ×` the roots of the Hermite polynomial of order `N+1`, computed
    /// numerically.
    ScaledHermiteNodes(SymmetricSpectrum),
    /// `E_k² ≈ slope·k + intercept` over the lower half of the positive
    /// levels, `k = 1, 2, …`.
    SquareRootLaw { levels: SymmetricSpectrum, fit: LinearFit },
}

impl ExpectedSpectrum {
    /// The levels themselves, exact or computed.
    pub fn levels(&self) -> &SymmetricSpectrum {
        match self {
            Self::Exact(s) | Self::ScaledHermiteNodes(s) => s,
            Self::SquareRootLaw { levels, .. } => levels,
        }
    }
}

pub fn expected_spectrum(kind: &ModelKind) -> Result<ExpectedSpectrum, ModelError> {
    kind.validate()?;
    let size = kind.sites();
    let n = size - 1;
    Ok(match *kind {
        ModelKind::FiniteOscillator { .. } => {
            let half = n as f64 / 2.0;
            ExpectedSpectrum::Exact(SymmetricSpectrum::new((0..size).map(|k| k as f64 - half).collect())?)
        }
        ModelKind::Uniform { c, .. } => {
            let levels = (1..=size)
                .map(|k| 2.0 * c * (k as f64 * std::f64::consts::PI / (n + 2) as f64).cos())
                .collect();
            ExpectedSpectrum::Exact(SymmetricSpectrum::new(levels)?)
        }
        ModelKind::PositionChain { .. } => {
            let hermite = ChainCouplings::new((1..=n).map(|i| (i as f64 / 2.0).sqrt()).collect())?;
            ExpectedSpectrum::ScaledHermiteNodes(eig_jacobi(&hermite).spectrum.scaled(2f64.sqrt()))
        }
        ModelKind::DiracOscillator { .. } => {
            let levels = eig_jacobi(&model_couplings(kind)?).spectrum;
            let fit = square_root_law(&levels).ok_or(ModelError::TooFewSites(size))?;
            ExpectedSpectrum::SquareRootLaw { levels, fit }
        }
    })
}

/// Fits `E_k²` against `k = 1, 2, …` over the lower half (rounded up) of
/// the positive levels. `None` with fewer than two points.
pub fn square_root_law(levels: &SymmetricSpectrum) -> Option<LinearFit> {
    let positive = levels.positive_half();
    let lower = &positive[..positive.len().div_ceil(2)];
    let k: Vec<f64> = (1..=lower.len()).map(|i| i as f64).collect();
    let e2: Vec<f64> = lower.iter().map(|e| e * e).collect();
    LinearFit::least_squares(&k, &e2)
}
