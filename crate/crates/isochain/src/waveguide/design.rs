use super::{couplings_to_segments, embed_spectrum, layout_geometry, DesignError, GuideGeometry, GuideParams, Pattern};
use crate::spectral::{eig_jacobi, ChainCouplings};

/// A chain turned into a guide.
#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    pub scale: f64,
    /// True when the segment-length floor fixed the scale.
    pub capped: bool,
    /// Tight-binding levels `E_b + s E_k`.
    pub predicted: Vec<f64>,
    pub geometry: GuideGeometry,
}

/// Embeds the spectrum of `couplings`, converts the couplings to segment
/// lengths and lays them out. `scale` overrides the embedding scale, for
/// families of chains that must share one.
pub fn design_guide(
    couplings: &ChainCouplings,
    params: &GuideParams,
    pattern: &Pattern,
    scale: Option<f64>,
) -> Result<Design, DesignError> {
    let target = eig_jacobi(couplings).spectrum;
    let (scale, capped) = match scale {
        Some(s) => (s, false),
        None => {
            let e = embed_spectrum(&target, Some(couplings), params)?;
            (e.scale, e.capped)
        }
    };
    let segments = couplings_to_segments(couplings, params, scale)?;
    let geometry = layout_geometry(&segments, pattern, params)?;
    let predicted = target.values().iter().map(|e| params.bound + scale * e).collect();
    Ok(Design { scale, capped, predicted, geometry })
}
