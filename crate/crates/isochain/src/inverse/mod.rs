//! From a target spectrum back to couplings.
//!
//! Three routes: Newton iteration on the coefficient system with pins that
//! pick a point on the isospectral surface, direct reconstruction from a
//! single known eigenvector, and the unitary orbits generated by the
//! lateral factorization of the chain. [`coupling_distribution`] runs the
//! solver over random ensembles of target spectra.

mod ensemble;
mod measure;
mod newton;
mod orbit;
mod reconstruct;
mod residual;
mod surface;

use thiserror::Error;

use crate::spectral::SpectralError;

pub use ensemble::{
    coupling_distribution, random_spectrum, CouplingStats, EnsembleKind, EnsembleSpec, Histogram,
};
pub use measure::{chain_from_weights, weight_count};
pub use newton::{newton_solve, InverseProblem, SolveResult};
pub use orbit::{
    build_x, lateral_factor, orbit_invariants, orbit_map, scan_admissible, AdmissiblePoint, LateralFactor,
    OrbitInvariants, OrbitPhases, MAX_SCAN_POINTS,
};
pub use reconstruct::{reconstruct_from_eigenpair, reconstruct_zero_mode};
pub use residual::{active_orders, residual, residual_jacobian};
pub use surface::{sample_surface, sample_surface_with_stats, SurfaceSamples};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InverseError {
    #[error("{couplings} couplings do not fit a spectrum of {levels} levels")]
    DimensionMismatch { couplings: usize, levels: usize },
    #[error("expected {expected} pinned couplings, got {got}")]
    PinCount { expected: usize, got: usize },
    #[error("pin index {index} outside 1..={n}")]
    PinIndex { index: usize, n: usize },
    #[error("pinned coupling F_{index} = {value} must be positive and finite")]
    PinValue { index: usize, value: f64 },
    #[error("target spectrum is identically zero; no positive couplings reproduce it")]
    DegenerateTarget,
    #[error("Newton iteration did not converge after {restarts} restarts (best residual {best_residual:e})")]
    NoConvergence { best_residual: f64, restarts: usize },
    #[error("pinned values admit no solution (best residual {best_residual:e})")]
    InfeasiblePins { best_residual: f64 },
    #[error("{skipped} of {requested} surface samples failed")]
    TooManySkipped { skipped: usize, requested: usize },
    #[error("division by a vanishing component phi_{index}")]
    ZeroDivision { index: usize },
    #[error("vector is not an eigenvector of the reconstructed chain (residual {residual:e})")]
    NotAnEigenvector { residual: f64 },
    #[error("zero-energy reconstruction needs {expected} scales, got {got}")]
    ScaleCount { expected: usize, got: usize },
    #[error("spectral weights must be positive, finite and not concentrated on fewer levels than the chain")]
    InvalidWeights,
    #[error("lateral factor needs a nonzero finite A_1")]
    ZeroFactor,
    #[error("phase scan would visit {points} points, limit {max}")]
    ScanTooLarge { points: usize, max: usize },
    #[error("orbit Gram diagonal G_{index}{index} = {value:e} is negative")]
    NegativeDiagonal { index: usize, value: f64 },
    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),
    #[error("count must be at least 1")]
    EmptyRequest,
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}
