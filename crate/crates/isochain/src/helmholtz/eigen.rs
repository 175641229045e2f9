//! Lowest eigenpairs by shift-invert Lanczos.
//!
//! With a shift `σ` below the wanted levels, `(A − σI)⁻¹` maps them to its
//! largest eigenvalues `θ = 1/(λ − σ)`, which Lanczos finds first. The
//! shifted matrix is factored once; the count of levels below a threshold
//! comes from the inertia of a second factorization.

use rand::Rng;

use super::{FdError, SkylineLdl, SparseOperator};
use crate::rng;
use crate::spectral::tridiag_eigen;

/// Relative residual demanded of every returned pair.
pub const RESIDUAL_TOL: f64 = 1e-8;
const RITZ_TOL: f64 = 1e-12;
/// Shift as a fraction of the threshold when levels below a threshold are
/// wanted.
const SHIFT_FRACTION: f64 = 0.6;
/// Inertia bisections placing the shift under the lowest wanted level.
const SHIFT_BISECTIONS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Window {
    /// Every level strictly below the value.
    Below(f64),
    /// The given number of lowest levels.
    Lowest(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeResult {
    /// `k²`, ascending.
    pub eigenvalues: Vec<f64>,
    /// Normalized to `h² Σ v² = 1`, largest-magnitude entry positive.
    pub vectors: Vec<Vec<f64>>,
    pub threshold: Option<f64>,
    /// Relative residuals `‖Av − λv‖ / (λ ‖v‖)`.
    pub residuals: Vec<f64>,
}

impl ModeResult {
    pub fn count(&self) -> usize {
        self.eigenvalues.len()
    }
}

/// Eigenpairs of `op` in `window`.
pub fn lowest_modes(op: &SparseOperator, window: Window) -> Result<ModeResult, FdError> {
    let shift = match window {
        Window::Below(t) => SHIFT_FRACTION * t,
        Window::Lowest(_) => 0.0,
    };
    lowest_modes_with_shift(op, window, shift)
}

/// [`lowest_modes`] with an explicit shift. A shift with levels below it
/// is lowered until the factorization is positive definite.
pub fn lowest_modes_with_shift(op: &SparseOperator, window: Window, shift: f64) -> Result<ModeResult, FdError> {
    let n = op.dim();
    let perm = super::ldl::rcm_order(op);
    let mut shift = shift;
    let mut factor = SkylineLdl::factor(op, shift, perm.clone());
    for _ in 0..60 {
        if factor.negative_pivots() == 0 && factor.min_abs_pivot() > 0.0 {
            break;
        }
        shift = if shift > 0.0 { shift * 0.5 } else { shift - 1.0 };
        factor = SkylineLdl::factor(op, shift, perm.clone());
    }
    let (wanted, threshold) = match window {
        Window::Lowest(k) => (k.min(n), None),
        Window::Below(t) => {
            if t <= shift {
                (0, Some(t))
            } else {
                (SkylineLdl::factor(op, t, perm.clone()).negative_pivots(), Some(t))
            }
        }
    };
    if wanted == 0 {
        return Ok(ModeResult { eigenvalues: vec![], vectors: vec![], threshold, residuals: vec![] });
    }
    if let Window::Below(t) = window {
        // move the shift up to just below the lowest level
        let (mut lo, mut hi) = (shift, t);
        for _ in 0..SHIFT_BISECTIONS {
            let mid = 0.5 * (lo + hi);
            let trial = SkylineLdl::factor(op, mid, perm.clone());
            if trial.negative_pivots() == 0 {
                (lo, factor) = (mid, trial);
            } else {
                hi = mid;
            }
        }
        if lo > shift {
            let back = lo - (hi - lo);
            if back > shift {
                factor = SkylineLdl::factor(op, back, perm.clone());
                lo = back;
            }
            shift = lo;
        }
    }
    let (values, mut vectors) = lanczos(op, &factor, shift, wanted)?;
    let h = op.h();
    let mut residuals = Vec::with_capacity(wanted);
    for (lambda, v) in values.iter().zip(vectors.iter_mut()) {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let big = v.iter().fold(0.0f64, |m, x| if x.abs() > m.abs() { *x } else { m });
        let scale = big.signum() / (norm * h);
        v.iter_mut().for_each(|x| *x *= scale);
        let av = op.apply(v);
        let r = av.iter().zip(v.iter()).map(|(a, x)| (a - lambda * x).powi(2)).sum::<f64>().sqrt();
        let vn = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        residuals.push(r / (lambda.abs().max(f64::MIN_POSITIVE) * vn));
    }
    let worst = residuals.iter().fold(0.0f64, |m, r| m.max(*r));
    if !(worst <= RESIDUAL_TOL) {
        return Err(FdError::ConvergenceFailure { residuals });
    }
    Ok(ModeResult { eigenvalues: values, vectors, threshold, residuals })
}

/// The `wanted` eigenpairs of `A` nearest above `shift`, by Lanczos with
/// full reorthogonalization on `(A − σI)⁻¹`.
fn lanczos(op: &SparseOperator, factor: &SkylineLdl, shift: f64, wanted: usize) -> Result<(Vec<f64>, Vec<Vec<f64>>), FdError> {
    let n = op.dim();
    let max_steps = n.min(wanted * 20 + 200);
    let mut rng = rng::stream(0, "lanczos", n as u64);
    let mut q: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    normalize(&mut q);
    let mut basis: Vec<Vec<f64>> = vec![q];
    let (mut alpha, mut beta) = (Vec::new(), Vec::<f64>::new());
    let mut ritz = None;
    for step in 0..max_steps {
        let mut w = factor.solve(&basis[step]);
        let a = dot(&w, &basis[step]);
        alpha.push(a);
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&w, b);
                axpy(&mut w, -c, b);
            }
        }
        let b = dot(&w, &w).sqrt();
        let k = alpha.len();
        let check = k >= wanted && (k % 5 == 0 || b == 0.0 || k == max_steps || k == n);
        if check {
            let (theta, s) = tridiag_eigen(&alpha, &beta);
            // largest θ last; their Lanczos residuals are |β s_{k,i}|
            let converged = (0..wanted).all(|r| {
                let col = k - 1 - r;
                (b * s[(k - 1) * k + col]).abs() <= RITZ_TOL * theta[col].abs()
            });
            if converged || b <= 1e-14 * theta[k - 1].abs() || k == n {
                ritz = Some((theta, s, k));
                break;
            }
        }
        if b <= f64::MIN_POSITIVE {
            break;
        }
        beta.push(b);
        w.iter_mut().for_each(|x| *x /= b);
        basis.push(w);
    }
    let Some((theta, s, k)) = ritz else {
        return Err(FdError::ConvergenceFailure { residuals: vec![f64::INFINITY; wanted] });
    };
    if k < wanted {
        return Err(FdError::ConvergenceFailure { residuals: vec![f64::INFINITY; wanted] });
    }
    let mut values = Vec::with_capacity(wanted);
    let mut vectors = Vec::with_capacity(wanted);
    for r in 0..wanted {
        let col = k - 1 - r;
        values.push(shift + 1.0 / theta[col]);
        let mut v = vec![0.0; n];
        for (i, b) in basis.iter().take(k).enumerate() {
            axpy(&mut v, s[i * k + col], b);
        }
        vectors.push(v);
    }
    Ok((values, vectors))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    y.iter_mut().zip(x).for_each(|(u, v)| *u += a * v);
}

fn normalize(v: &mut [f64]) {
    let n = dot(v, v).sqrt();
    v.iter_mut().for_each(|x| *x /= n);
}
