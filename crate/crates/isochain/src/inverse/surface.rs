use std::collections::BTreeMap;

use rand::seq::index;
use rand::Rng;
use rayon::prelude::*;

use super::newton::{follow_levels, newton_solve, project_to_surface, InverseProblem};
use super::InverseError;
use crate::rng;
use crate::spectral::{ChainCouplings, SymmetricSpectrum};

/// Random starts for the Gauss-Newton projection.
const STARTS: usize = 128;
/// Random starts for the level homotopy once every projection stalled.
const FALLBACK_STARTS: usize = 4;

/// Samples plus how many requested points were given up on.
#[derive(Debug, Clone)]
pub struct SurfaceSamples {
    pub samples: Vec<ChainCouplings>,
    pub skipped: usize,
}

/// `count` random points of the isospectral surface of `target`.
///
/// Each point starts from random squared couplings, uniform on the simplex
/// cut out by the sum rule `ΣF² = ΣE₊²`, and is carried onto the surface by
/// minimum-norm Gauss-Newton steps with every coupling free. Starts are
/// redrawn when the iteration stalls; after that the level homotopy is
/// tried. `⌊N/2⌋` randomly chosen couplings of the result are pinned and
/// [`newton_solve`] re-solves the coefficient system from there, so every
/// sample is a verified pinned solution. Points that cannot be reached are
/// skipped; more than half skipped is an error.
pub fn sample_surface(
    target: &SymmetricSpectrum,
    count: usize,
    seed: u64,
) -> Result<Vec<ChainCouplings>, InverseError> {
    Ok(sample_surface_with_stats(target, count, seed)?.samples)
}

pub fn sample_surface_with_stats(
    target: &SymmetricSpectrum,
    count: usize,
    seed: u64,
) -> Result<SurfaceSamples, InverseError> {
    if count == 0 {
        return Err(InverseError::EmptyRequest);
    }
    let n = target.chain_len();
    if n > 0 && target.max_abs() == 0.0 {
        return Err(InverseError::DegenerateTarget);
    }
    let drawn: Vec<Option<ChainCouplings>> =
        (0..count as u64).into_par_iter().map(|i| sample_one(target, seed, i)).collect();
    let skipped = drawn.iter().filter(|s| s.is_none()).count();
    if 2 * skipped > count {
        return Err(InverseError::TooManySkipped { skipped, requested: count });
    }
    Ok(SurfaceSamples { samples: drawn.into_iter().flatten().collect(), skipped })
}

fn sample_one(target: &SymmetricSpectrum, seed: u64, i: u64) -> Option<ChainCouplings> {
    let n = target.chain_len();
    if n == 0 {
        return ChainCouplings::new(Vec::new()).ok();
    }
    let mut rng = rng::stream(seed, "surface", i);
    let budget: f64 = target.positive_half().iter().map(|e| e * e).sum();
    let start = |rng: &mut rng::ChaCha8Rng| -> Vec<f64> {
        let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0f64)).collect();
        let total: f64 = raw.iter().sum();
        raw.iter().map(|v| v * budget / total).collect()
    };
    let mut point = None;
    for _ in 0..STARTS {
        point = project_to_surface(target, &start(&mut rng), 1e-12);
        if point.is_some() {
            break;
        }
    }
    for _ in 0..FALLBACK_STARTS {
        if point.is_some() {
            break;
        }
        point = follow_levels(target, &start(&mut rng), 1e-12);
    }
    let point = point?;
    let pins: BTreeMap<usize, f64> =
        index::sample(&mut rng, n, n / 2).iter().map(|m| (m + 1, point.values()[m])).collect();
    let problem = InverseProblem::new(target.clone(), pins)
        .ok()?
        .with_seed(rng::derive_seed(seed, "surface-newton", i))
        .with_initial_guess(point)
        .with_max_restarts(4);
    newton_solve(&problem).ok().map(|s| s.couplings)
}
