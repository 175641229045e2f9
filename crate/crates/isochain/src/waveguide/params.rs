use serde::{Deserialize, Serialize};

use super::DesignError;

/// Bound-state energy of a right-angle corner as a fraction of the
/// propagation threshold.
pub const BOUND_FRACTION: f64 = 0.93;
/// Evanescence length of the corner coupling, in units of the width.
pub const LAMBDA_PER_WIDTH: f64 = 1.3;
/// Coupling prefactor `Δ(0)` in units of `E_b`.
pub const DELTA0_PER_BOUND: f64 = 0.43;

/// Physical constants of a guide of width `L` with Dirichlet walls, in
/// units where the threshold is `E_t = π²/L²`.
///
/// `lambda`, `delta0` and `bound` are stored as absolute values; use
/// [`GuideParams::for_width`] for the default ratios.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GuideParams {
    pub width: f64,
    pub lambda: f64,
    pub delta0: f64,
    pub bound: f64,
    pub d_min: f64,
    pub safety: f64,
}

impl Default for GuideParams {
    fn default() -> Self {
        Self::for_width(1.0)
    }
}

impl GuideParams {
    pub fn for_width(width: f64) -> Self {
        let threshold = std::f64::consts::PI.powi(2) / (width * width);
        let bound = BOUND_FRACTION * threshold;
        Self {
            width,
            lambda: LAMBDA_PER_WIDTH * width,
            delta0: DELTA0_PER_BOUND * bound,
            bound,
            d_min: width,
            safety: 0.9,
        }
    }

    /// `E_t = π²/L²`.
    pub fn threshold(&self) -> f64 {
        std::f64::consts::PI.powi(2) / (self.width * self.width)
    }

    /// Largest physical coupling that still gives segments of at least
    /// `d_min`.
    pub fn coupling_cap(&self) -> f64 {
        self.delta0 * (-self.d_min / self.lambda).exp()
    }

    pub fn validate(&self) -> Result<(), DesignError> {
        let checks = [
            ("width", self.width),
            ("lambda", self.lambda),
            ("delta0", self.delta0),
            ("bound", self.bound),
            ("safety", self.safety),
        ];
        for (name, value) in checks {
            if !(value > 0.0 && value.is_finite()) {
                return Err(DesignError::InvalidParams(format!("{name} must be positive, got {value}")));
            }
        }
        if !(self.d_min >= 0.0 && self.d_min.is_finite()) {
            return Err(DesignError::InvalidParams(format!("d_min must be nonnegative, got {}", self.d_min)));
        }
        if self.safety > 1.0 {
            return Err(DesignError::InvalidParams(format!("safety must be at most 1, got {}", self.safety)));
        }
        if self.bound >= self.threshold() {
            return Err(DesignError::InvalidParams(format!(
                "bound energy {} must lie below the threshold {}",
                self.bound,
                self.threshold()
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let p = GuideParams::default();
        let pi2 = std::f64::consts::PI.powi(2);
        assert!((p.threshold() - pi2).abs() < 1e-14);
        assert!((p.bound - 0.93 * pi2).abs() < 1e-12);
        assert!((p.delta0 - 0.43 * p.bound).abs() < 1e-12);
        assert_eq!((p.lambda, p.d_min, p.safety), (1.3, 1.0, 0.9));
        p.validate().unwrap();
    }

    #[test]
    fn scales_with_width() {
        let p = GuideParams::for_width(2.0);
        assert!((p.threshold() * 4.0 - GuideParams::default().threshold()).abs() < 1e-12);
        assert_eq!(p.lambda, 2.6);
    }

    #[test]
    fn rejects_bad_values() {
        let p = GuideParams::default();
        assert!(GuideParams { safety: 0.0, ..p }.validate().is_err());
        assert!(GuideParams { safety: 1.5, ..p }.validate().is_err());
        assert!(GuideParams { d_min: -1.0, ..p }.validate().is_err());
        assert!(GuideParams { bound: 10.0, ..p }.validate().is_err());
        assert!(GuideParams { d_min: 0.0, ..p }.validate().is_ok());
    }
}
