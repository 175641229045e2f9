use super::SpectralError;

/// Relative tolerance used when deciding whether a list of energies is
/// symmetric about zero.
pub const SYMMETRY_TOL: f64 = 1e-9;

/// Positive hopping amplitudes `F_1..F_N` of an `(N+1)`-site chain.
///
/// Couplings are kept in gauge-reduced form: every entry is finite and
/// strictly positive. A zero coupling would split the chain in two.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainCouplings {
    values: Vec<f64>,
}

impl ChainCouplings {
    pub fn new(values: Vec<f64>) -> Result<Self, SpectralError> {
        for (i, &f) in values.iter().enumerate() {
            if !f.is_finite() {
                return Err(SpectralError::NonFiniteCoupling { index: i + 1 });
            }
            if f <= 0.0 {
                return Err(SpectralError::NonPositiveCoupling { index: i + 1, value: f });
            }
        }
        Ok(Self { values })
    }

    /// Builds a chain from squared couplings `x_n = F_n^2`.
    pub fn from_squares(squares: &[f64]) -> Result<Self, SpectralError> {
        Self::new(squares.iter().map(|x| x.sqrt()).collect())
    }

    /// A chain of `n` equal couplings.
    pub fn uniform(n: usize, value: f64) -> Result<Self, SpectralError> {
        Self::new(vec![value; n])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn squares(&self) -> Vec<f64> {
        self.values.iter().map(|f| f * f).collect()
    }

    /// `N`, the number of couplings (site count minus one).
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sites(&self) -> usize {
        self.values.len() + 1
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// `F -> c F`.
    pub fn scaled(&self, c: f64) -> Result<Self, SpectralError> {
        Self::new(self.values.iter().map(|f| f * c).collect())
    }
}

/// Eigenvalues of a chain: a multiset symmetric about zero, sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricSpectrum {
    values: Vec<f64>,
}

impl SymmetricSpectrum {
    /// Sorts `values` and checks the `E -> -E` symmetry to within
    /// [`SYMMETRY_TOL`] relative to the largest magnitude. An odd number of
    /// levels must contain zero, which the symmetry check already enforces.
    pub fn new(mut values: Vec<f64>) -> Result<Self, SpectralError> {
        if values.is_empty() {
            return Err(SpectralError::EmptySpectrum);
        }
        if let Some(i) = values.iter().position(|e| !e.is_finite()) {
            return Err(SpectralError::NonFiniteEnergy { index: i + 1 });
        }
        values.sort_by(f64::total_cmp);
        let scale = values.iter().fold(0.0f64, |m, e| m.max(e.abs()));
        let tol = SYMMETRY_TOL * scale.max(f64::MIN_POSITIVE);
        let n = values.len();
        let violation = (0..n)
            .map(|k| (values[k] + values[n - 1 - k]).abs())
            .fold(0.0, f64::max);
        if violation > tol {
            return Err(SpectralError::Asymmetric { violation, tolerance: tol });
        }
        Ok(Self { values })
    }

    /// Builds the symmetric spectrum `{±e}` (plus a zero when `odd` is set)
    /// from a list of non-negative magnitudes.
    pub fn from_positive(magnitudes: &[f64], odd: bool) -> Result<Self, SpectralError> {
        let mut v: Vec<f64> = magnitudes.iter().flat_map(|&e| [e, -e]).collect();
        if odd {
            v.push(0.0);
        }
        Self::new(v)
    }

    /// Skips the symmetry check. Callers guarantee the invariant.
    pub(crate) fn from_sorted_unchecked(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `N` for a spectrum of `N+1` levels.
    pub fn chain_len(&self) -> usize {
        self.values.len() - 1
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, e| m.max(e.abs()))
    }

    /// The strictly positive half, ascending.
    pub fn positive_half(&self) -> &[f64] {
        let n = self.values.len();
        &self.values[n - n / 2..]
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut v: Vec<f64> = self.values.iter().map(|e| e * c).collect();
        if c < 0.0 {
            v.reverse();
        }
        Self { values: v }
    }
}

/// Coefficients `Λ^0..Λ^{N+1}` of `Φ_N(λ) = det(H + λ) = Σ_j Λ^j λ^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct CharPolyCoeffs {
    coeffs: Vec<f64>,
}

impl CharPolyCoeffs {
    pub(crate) fn from_vec(coeffs: Vec<f64>) -> Self {
        debug_assert!(!coeffs.is_empty());
        Self { coeffs }
    }

    pub fn new(coeffs: Vec<f64>) -> Result<Self, SpectralError> {
        match coeffs.last() {
            Some(&c) if c == 1.0 => Ok(Self { coeffs }),
            _ => Err(SpectralError::NotMonic),
        }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// The chain index `N`; the polynomial has degree `N+1`.
    pub fn chain_len(&self) -> usize {
        self.coeffs.len() - 2
    }

    pub fn get(&self, j: usize) -> f64 {
        self.coeffs[j]
    }
}

impl std::ops::Index<usize> for CharPolyCoeffs {
    type Output = f64;
    fn index(&self, j: usize) -> &f64 {
        &self.coeffs[j]
    }
}

/// All eigenpairs of a chain. Column `k` of `vectors` holds the components
/// `φ_n^k`, ordered like the spectrum.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub spectrum: SymmetricSpectrum,
    /// Row-major `(N+1) x (N+1)`, `vectors[n * size + k] = φ_{n+1}^k`.
    vectors: Vec<f64>,
    size: usize,
}

impl EigenSystem {
    pub(crate) fn new(spectrum: SymmetricSpectrum, vectors: Vec<f64>) -> Self {
        let size = spectrum.len();
        debug_assert_eq!(vectors.len(), size * size);
        Self { spectrum, vectors, size }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Component on site `n` (0-based) of eigenvector `k`.
    pub fn component(&self, n: usize, k: usize) -> f64 {
        self.vectors[n * self.size + k]
    }

    pub fn vector(&self, k: usize) -> Vec<f64> {
        (0..self.size).map(|n| self.component(n, k)).collect()
    }

    pub fn energy(&self, k: usize) -> f64 {
        self.spectrum.values()[k]
    }

    /// Largest `|E φ_n - F_n φ_{n+1} - F_{n-1} φ_{n-1}|` over all sites and
    /// eigenpairs, with `φ_0 = φ_{N+2} = 0`.
    pub fn recurrence_residual(&self, couplings: &ChainCouplings) -> f64 {
        let f = couplings.values();
        let mut worst = 0.0f64;
        for k in 0..self.size {
            let e = self.energy(k);
            let phi = self.vector(k);
            worst = worst.max(three_term_residual(f, e, &phi));
        }
        worst
    }

    /// Largest deviation of `Φᵀ Φ` from the identity.
    pub fn orthonormality_error(&self) -> f64 {
        let n = self.size;
        let mut worst = 0.0f64;
        for a in 0..n {
            for b in a..n {
                let dot: f64 = (0..n).map(|i| self.component(i, a) * self.component(i, b)).sum();
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }
}

/// Largest site residual of `E φ_n = F_n φ_{n+1} + F_{n-1} φ_{n-1}`.
pub fn three_term_residual(couplings: &[f64], energy: f64, phi: &[f64]) -> f64 {
    let n = phi.len();
    assert_eq!(couplings.len() + 1, n, "vector length must be N+1");
    (0..n)
        .map(|i| {
            let right = if i + 1 < n { couplings[i] * phi[i + 1] } else { 0.0 };
            let left = if i > 0 { couplings[i - 1] * phi[i - 1] } else { 0.0 };
            (energy * phi[i] - right - left).abs()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_zero_and_negative_couplings() {
        assert!(matches!(
            ChainCouplings::new(vec![1.0, 0.0]),
            Err(SpectralError::NonPositiveCoupling { index: 2, .. })
        ));
        assert!(ChainCouplings::new(vec![-1.0]).is_err());
        assert!(ChainCouplings::new(vec![f64::NAN]).is_err());
        assert!(ChainCouplings::new(vec![]).unwrap().is_empty());
    }

    #[test]
    fn spectrum_symmetry_gate() {
        let s = SymmetricSpectrum::new(vec![1.0, -1.0, 0.0]).unwrap();
        assert_eq!(s.values(), &[-1.0, 0.0, 1.0]);
        assert_eq!(s.positive_half(), &[1.0]);
        assert!(SymmetricSpectrum::new(vec![-1.0, 0.5]).is_err());
        // odd count without a zero cannot be symmetric
        assert!(SymmetricSpectrum::new(vec![-1.0, 0.1, 1.0]).is_err());
        assert!(SymmetricSpectrum::new(vec![]).is_err());
    }

    #[test]
    fn positive_half_even() {
        let s = SymmetricSpectrum::from_positive(&[2.0, 1.0], false).unwrap();
        assert_eq!(s.values(), &[-2.0, -1.0, 1.0, 2.0]);
        assert_eq!(s.positive_half(), &[1.0, 2.0]);
    }
}
