//! Corner modes, two-corner splittings and whole-guide spectra.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{assemble_laplacian, discrete_threshold, lowest_modes, FdError, GridDomain, ModeResult, Window};
use crate::csvio::Table;
use crate::fit::LinearFit;
use crate::spectral::{eig_jacobi, ChainCouplings};
use crate::waveguide::{rasterize_mask, snap_geometry, DesignError, GuideGeometry, GuideParams, Turn, ARM_WIDTHS};
use crate::Result;

/// Shortest arm, in widths, for which truncation is negligible.
pub const MIN_ARM_WIDTHS: f64 = 6.0;

/// The trapped level of a single right-angle corner on one grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CornerState {
    pub h: f64,
    pub bound: f64,
    /// `E_t(h)`, the threshold of the same grid.
    pub threshold: f64,
    /// `E_b(h) / E_t(h)`.
    pub ratio: f64,
}

/// Corner levels on successively halved grids and their extrapolation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CornerExtrapolation {
    pub states: Vec<CornerState>,
    /// `E_b` extrapolated from the two finest grids assuming second order.
    pub bound: f64,
    /// `bound / (π²/L²)`.
    pub ratio: f64,
    /// `(E_1 − E_2) / (E_2 − E_3)` over the first three grids; 4 for a
    /// second-order scheme.
    pub difference_ratio: Option<f64>,
    /// `log₂` of `difference_ratio` for halved grids.
    pub observed_order: Option<f64>,
    /// `E_b` extrapolated with the observed order instead of 2.
    pub bound_observed: Option<f64>,
}

fn check_arms(arms: f64, width: f64) -> Result<()> {
    if arms < MIN_ARM_WIDTHS * width * (1.0 - 1e-12) {
        return Err(DesignError::InvalidParams(format!("arms must be at least {MIN_ARM_WIDTHS} widths, got {arms}")).into());
    }
    Ok(())
}

/// An L-shaped guide: one corner, two arms of length `arms` measured from
/// the corner vertex.
pub fn single_corner_geometry(arms: f64, width: f64) -> Result<GuideGeometry> {
    Ok(GuideGeometry::trace(&[], &[Turn::Left], width, arms)?)
}

/// Lowest level of the L-shaped guide with grid step `h`.
pub fn corner_bound_state(arms: f64, h: f64, width: f64) -> Result<CornerState> {
    check_arms(arms, width)?;
    let domain = rasterize_mask(&single_corner_geometry(arms, width)?, h)?;
    let threshold = discrete_threshold(h, width);
    let modes = lowest_modes(&assemble_laplacian(&domain), Window::Below(threshold))?;
    let bound = *modes.eigenvalues.first().ok_or(FdError::NoBoundState { threshold })?;
    Ok(CornerState { h, bound, threshold, ratio: bound / threshold })
}

/// [`corner_bound_state`] for `h = width / steps` and Richardson
/// extrapolation over the two finest grids. `steps` must double.
pub fn extrapolate_corner(arms: f64, steps: &[usize], width: f64) -> Result<CornerExtrapolation> {
    if steps.len() < 2 || steps.windows(2).any(|w| w[1] != 2 * w[0]) {
        return Err(DesignError::InvalidParams("need at least two grids, each twice as fine as the last".into()).into());
    }
    let states = steps
        .par_iter()
        .map(|&m| corner_bound_state(arms, width / m as f64, width))
        .collect::<Result<Vec<_>>>()?;
    let k = states.len();
    let (coarse, fine) = (states[k - 2].bound, states[k - 1].bound);
    let bound = fine + (fine - coarse) / 3.0;
    let continuum = std::f64::consts::PI.powi(2) / (width * width);
    let (difference_ratio, observed_order, bound_observed) = if k >= 3 {
        let q = (states[k - 3].bound - coarse) / (coarse - fine);
        let p = q.log2();
        let extrapolated = fine + (fine - coarse) / (q - 1.0);
        (Some(q), Some(p), Some(extrapolated))
    } else {
        (None, None, None)
    };
    Ok(CornerExtrapolation { states, bound, ratio: bound / continuum, difference_ratio, observed_order, bound_observed })
}

/// Two-corner guide shapes: both turns the same way (`U`) or opposite (`S`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Bend {
    U,
    S,
}

impl Bend {
    fn turns(self) -> [Turn; 2] {
        match self {
            Self::U => [Turn::Left, Turn::Left],
            Self::S => [Turn::Left, Turn::Right],
        }
    }

    /// The symmetry exchanging the two corners at `(0, 0)` and `(0, d)`:
    /// a mirror for `U`, a half turn for `S`.
    fn partner(self, [x, y]: [f64; 2], d: f64) -> [f64; 2] {
        match self {
            Self::U => [x, d - y],
            Self::S => [-x, d - y],
        }
    }
}

pub fn two_corner_geometry(d: f64, bend: Bend, width: f64) -> Result<GuideGeometry> {
    Ok(GuideGeometry::trace(&[d], &bend.turns(), width, ARM_WIDTHS * width)?)
}

/// The two trapped levels of a two-corner guide.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplittingPoint {
    /// Corner separation after snapping to the grid.
    pub d: f64,
    pub bend: Bend,
    pub h: f64,
    /// Level of the mode even under the corner exchange.
    pub e_sym: f64,
    /// Level of the mode odd under the corner exchange.
    pub e_antisym: f64,
    /// `|E_antisym − E_sym| / 2`.
    pub coupling: f64,
    pub threshold: f64,
}

impl SplittingPoint {
    pub fn symmetric_is_lower(&self) -> bool {
        self.e_sym < self.e_antisym
    }
}

/// Exchange parity `Σ v(x) v(Px) / Σ v²` of each mode.
fn parities(domain: &GridDomain, modes: &ModeResult, bend: Bend, d: f64) -> Vec<f64> {
    let partner: Vec<Option<usize>> = (0..domain.unknowns())
        .map(|u| {
            let [x, y] = bend.partner(domain.position(u), d);
            domain.unknown_at(x, y)
        })
        .collect();
    modes
        .vectors
        .iter()
        .map(|v| {
            let overlap: f64 = partner.iter().enumerate().filter_map(|(u, p)| p.map(|p| v[u] * v[p])).sum();
            overlap / v.iter().map(|x| x * x).sum::<f64>()
        })
        .collect()
}

/// Levels of a two-corner guide with separation `d`; the two lowest are
/// told apart by their exchange parity, not their order.
pub fn two_corner_splitting(d: f64, bend: Bend, h: f64, width: f64) -> Result<SplittingPoint> {
    let geometry = snap_geometry(&two_corner_geometry(d, bend, width)?, h)?;
    let d = geometry.segments[0];
    let domain = rasterize_mask(&geometry, h)?;
    let threshold = discrete_threshold(h, width);
    let modes = lowest_modes(&assemble_laplacian(&domain), Window::Below(threshold))?;
    if modes.count() < 2 {
        return Err(FdError::FewerThanTwoBoundStates { found: modes.count() }.into());
    }
    let parity = parities(&domain, &modes, bend, d);
    let (e_sym, e_antisym) = if parity[0] >= parity[1] {
        (modes.eigenvalues[0], modes.eigenvalues[1])
    } else {
        (modes.eigenvalues[1], modes.eigenvalues[0])
    };
    Ok(SplittingPoint { d, bend, h, e_sym, e_antisym, coupling: 0.5 * (e_antisym - e_sym).abs(), threshold })
}

/// [`two_corner_splitting`] over several separations, in parallel.
pub fn splitting_sweep(ds: &[f64], bend: Bend, h: f64, width: f64) -> Result<Vec<SplittingPoint>> {
    ds.par_iter().map(|&d| two_corner_splitting(d, bend, h, width)).collect()
}

/// `F(d) = Δ(0) e^{−d/λ}` fitted by least squares on `(d, ln F)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayLaw {
    pub lambda: f64,
    pub delta0: f64,
    /// Magnitude of the Pearson correlation of `ln F` with `d`.
    pub correlation: f64,
    pub points: usize,
}

pub fn fit_decay_law(samples: &[(f64, f64)]) -> Result<DecayLaw> {
    if samples.len() < 2 {
        return Err(FdError::TooFewPoints { got: samples.len() }.into());
    }
    if let Some(&(d, f)) = samples.iter().find(|(d, f)| !(*f > 0.0) || !d.is_finite() || !f.is_finite()) {
        return Err(DesignError::InvalidParams(format!("decay samples need F > 0, got F({d}) = {f}")).into());
    }
    let x: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let y: Vec<f64> = samples.iter().map(|s| s.1.ln()).collect();
    let fit = LinearFit::least_squares(&x, &y)
        .ok_or_else(|| DesignError::InvalidParams("decay samples need two distinct separations".into()))?;
    if !(fit.slope < 0.0) {
        return Err(DesignError::InvalidParams(format!("couplings do not decay: slope {}", fit.slope)).into());
    }
    Ok(DecayLaw { lambda: -1.0 / fit.slope, delta0: fit.intercept.exp(), correlation: fit.correlation.abs(), points: samples.len() })
}

/// Guide parameters with `λ` and `Δ(0)` from a fitted decay law and `E_b`
/// from a corner level, for designs checked on a specific grid.
pub fn calibrated_params(base: &GuideParams, law: &DecayLaw, bound: f64) -> GuideParams {
    GuideParams { lambda: law.lambda, delta0: law.delta0, bound, ..*base }
}

/// `d,E_sym,E_antisym,F`.
pub fn sweep_table(points: &[SplittingPoint]) -> Table {
    let mut t = Table::new(&["d", "E_sym", "E_antisym", "F"]);
    for p in points {
        t.push(vec![p.d, p.e_sym, p.e_antisym, p.coupling]);
    }
    t
}

/// `x,y,value` point cloud of one mode.
pub fn mode_table(domain: &GridDomain, vector: &[f64]) -> Table {
    let mut t = Table::new(&["x", "y", "value"]);
    for (u, v) in vector.iter().enumerate() {
        let [x, y] = domain.position(u);
        t.push(vec![x, y, *v]);
    }
    t
}

/// Levels of a whole guide next to the chain prediction.
#[derive(Debug, Clone)]
pub struct SpectrumComparison {
    /// Computed levels below `E_t(h)`, ascending.
    pub levels: Vec<f64>,
    /// `E_b(h) + eig(Δ(0) e^{−d_n/λ})` on the snapped segments, restricted
    /// to levels below `E_t(h)`.
    pub predicted: Vec<f64>,
    /// Same-grid single-corner level.
    pub bound: f64,
    pub threshold: f64,
    /// `E_t(h) − E_b(h)`.
    pub window: f64,
    /// `|level − predicted| / window` over the common levels.
    pub deviations: Vec<f64>,
    pub domain: GridDomain,
    pub modes: ModeResult,
}

impl SpectrumComparison {
    pub fn counts_match(&self) -> bool {
        self.levels.len() == self.predicted.len()
    }

    pub fn max_deviation(&self) -> f64 {
        self.deviations.iter().fold(0.0, |m, d| f64::max(m, *d))
    }

    /// `level,predicted,deviation` per common level.
    pub fn levels_table(&self) -> Table {
        let mut t = Table::new(&["level", "predicted", "deviation"]);
        for ((l, p), d) in self.levels.iter().zip(&self.predicted).zip(&self.deviations) {
            t.push(vec![*l, *p, *d]);
        }
        t
    }
}

/// Rasterizes and solves `geometry`, and predicts its levels from the
/// corner-to-corner distances with the law in `params`.
pub fn spectrum_below_threshold(geometry: &GuideGeometry, params: &GuideParams, h: f64) -> Result<SpectrumComparison> {
    geometry.validate()?;
    let snapped = snap_geometry(geometry, h)?;
    let width = geometry.width;
    let corner = corner_bound_state(snapped.arms, h, width)?;
    let domain = rasterize_mask(&snapped, h)?;
    let threshold = corner.threshold;
    let modes = lowest_modes(&assemble_laplacian(&domain), Window::Below(threshold))?;
    let mut predicted = if snapped.segments.is_empty() {
        vec![corner.bound]
    } else {
        let couplings: Vec<f64> = snapped.segments.iter().map(|d| params.delta0 * (-d / params.lambda).exp()).collect();
        let eig = eig_jacobi(&ChainCouplings::new(couplings)?);
        eig.spectrum.values().iter().map(|e| corner.bound + e).collect()
    };
    predicted.retain(|e| *e < threshold);
    let window = threshold - corner.bound;
    let levels = modes.eigenvalues.clone();
    let deviations = levels.iter().zip(&predicted).map(|(l, p)| (l - p).abs() / window).collect();
    Ok(SpectrumComparison { levels, predicted, bound: corner.bound, threshold, window, deviations, domain, modes })
}
