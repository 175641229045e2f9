//! Straight-line least squares.

/// `y ≈ slope·x + intercept`, with the coefficient of determination and
/// the Pearson correlation of the data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub correlation: f64,
}

impl LinearFit {
    /// Ordinary least squares. `None` for fewer than two points, mismatched
    /// lengths or constant `x`.
    pub fn least_squares(x: &[f64], y: &[f64]) -> Option<Self> {
        if x.len() != y.len() || x.len() < 2 {
            return None;
        }
        let n = x.len() as f64;
        let mx = x.iter().sum::<f64>() / n;
        let my = y.iter().sum::<f64>() / n;
        let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
        let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
        let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
        if !(sxx > 0.0) {
            return None;
        }
        let slope = sxy / sxx;
        let intercept = my - slope * mx;
        // a perfectly flat y is fitted exactly
        let (r_squared, correlation) = if syy > 0.0 {
            let ss_res: f64 = x.iter().zip(y).map(|(a, b)| (b - slope * a - intercept).powi(2)).sum();
            (1.0 - ss_res / syy, sxy / (sxx * syy).sqrt())
        } else {
            (1.0, 0.0)
        };
        Some(Self { slope, intercept, r_squared, correlation })
    }

    pub fn predict(&self, x: f64) -> f64 {
        self.slope * x + self.intercept
    }
}
