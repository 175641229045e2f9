//! Bent-waveguide realisations of chains.
//!
//! Each corner of a right-angle guide traps one level at `E_b` below the
//! propagation threshold `E_t`, and two corners a distance `d` apart couple
//! with strength `Δ(0) e^{−d/λ}`. A chain is realised by placing its sites
//! at corners and choosing the corner-to-corner distances from its
//! couplings.

mod design;
mod export;
mod law;
mod layout;
mod params;
mod raster;

pub use design::{design_guide, Design};
pub use export::{geometry_from_json, geometry_to_json, outline_from_svg, outline_to_svg, GEOMETRY_SCHEMA_VERSION};
pub use law::{couplings_to_segments, embed_spectrum, segments_to_couplings, Embedding};
pub use layout::{layout_geometry, GuideGeometry, Pattern, Rect, Turn, ARM_WIDTHS};
pub use params::{GuideParams, BOUND_FRACTION, DELTA0_PER_BOUND, LAMBDA_PER_WIDTH};
pub use raster::{rasterize_mask, snap_geometry};

use thiserror::Error;

use crate::helmholtz::FdError;
use crate::spectral::SpectralError;

#[derive(Debug, Error)]
pub enum DesignError {
    #[error("invalid guide parameters: {0}")]
    InvalidParams(String),
    #[error("scale {scale} exceeds the largest feasible scale {max_scale}")]
    WindowViolation { scale: f64, max_scale: f64 },
    #[error("target spectrum is identically zero")]
    DegenerateTarget,
    #[error("expected {expected} turns, got {got}")]
    TurnCount { expected: usize, got: usize },
    #[error("segment {index} has length {length}, below d_min = {d_min}")]
    SegmentTooShort { index: usize, length: f64, d_min: f64 },
    #[error("pieces {first} and {second} of the guide intersect")]
    SelfIntersection { first: usize, second: usize },
    #[error("geometry has no centerline")]
    EmptyGeometry,
    #[error("bad geometry file: {0}")]
    BadGeometry(String),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Fd(#[from] FdError),
}
