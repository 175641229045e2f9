//! Finite-difference Dirichlet Laplacian on rasterized guides.
//!
//! The guide is sampled on a square lattice, `−∇²` is discretized with the
//! 5-point stencil, and the levels below the straight-strip threshold are
//! found by shift-invert Lanczos on an envelope `LDLᵀ` factorization.

mod corner;
mod eigen;
mod grid;
mod ldl;
mod operator;

pub use corner::{
    calibrated_params, corner_bound_state, extrapolate_corner, fit_decay_law, mode_table, single_corner_geometry,
    spectrum_below_threshold, splitting_sweep, sweep_table, two_corner_geometry, two_corner_splitting, Bend,
    CornerExtrapolation, CornerState, DecayLaw, SpectrumComparison, SplittingPoint, MIN_ARM_WIDTHS,
};
pub use eigen::{lowest_modes, lowest_modes_with_shift, ModeResult, Window, RESIDUAL_TOL};
pub use grid::{discrete_threshold, steps_per_width, GridDomain, MIN_STEPS_PER_WIDTH};
pub use ldl::{rcm_order, SkylineLdl};
pub use operator::{assemble_laplacian, SparseOperator};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum FdError {
    #[error("mask has {len} entries, expected {cols} x {rows}")]
    MaskShape { len: usize, cols: usize, rows: usize },
    #[error("domain has no interior nodes")]
    EmptyDomain,
    #[error("domain is disconnected: {reached} of {total} nodes reachable")]
    Disconnected { reached: usize, total: usize },
    #[error("grid step {h} does not divide the width {width}")]
    Resolution { h: f64, width: f64 },
    #[error("{steps} grid steps across the width, at least {MIN_STEPS_PER_WIDTH} needed")]
    ResolutionTooCoarse { steps: usize },
    #[error("bad mask file: {0}")]
    BadMask(String),
    #[error("field has {got} values, domain has {expected} nodes")]
    FieldLength { expected: usize, got: usize },
    #[error("eigensolver did not converge, residuals {residuals:?}")]
    ConvergenceFailure { residuals: Vec<f64> },
    #[error("no level below the threshold {threshold}")]
    NoBoundState { threshold: f64 },
    #[error("need two bound states to measure a splitting, found {found}")]
    FewerThanTwoBoundStates { found: usize },
    #[error("need at least two usable points to fit, got {got}")]
    TooFewPoints { got: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
