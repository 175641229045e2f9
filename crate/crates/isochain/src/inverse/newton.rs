use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use super::residual::{active_orders, coeffs_with_gradient};
use super::InverseError;
use crate::rng;
use crate::spectral::{eig_jacobi, expand_roots, ChainCouplings, EigenSystem, SymmetricSpectrum};

/// Target spectrum plus the `⌊N/2⌋` pinned couplings that select one point
/// of the isospectral surface.
#[derive(Debug, Clone)]
pub struct InverseProblem {
    pub target: SymmetricSpectrum,
    /// 1-based coupling index to its fixed (positive) value.
    pub pins: BTreeMap<usize, f64>,
    pub initial_guess: Option<ChainCouplings>,
    pub seed: u64,
    /// Bound on the scaled coefficient residual, see [`SolveResult`].
    pub tolerance: f64,
    pub max_iterations: usize,
    pub max_restarts: usize,
}

impl InverseProblem {
    pub fn new(target: SymmetricSpectrum, pins: BTreeMap<usize, f64>) -> Result<Self, InverseError> {
        let problem = Self {
            target,
            pins,
            initial_guess: None,
            seed: rng::DEFAULT_SEED,
            tolerance: 1e-12,
            max_iterations: 200,
            max_restarts: 50,
        };
        problem.validate()?;
        Ok(problem)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_initial_guess(mut self, guess: ChainCouplings) -> Self {
        self.initial_guess = Some(guess);
        self
    }

    pub fn with_max_restarts(mut self, restarts: usize) -> Self {
        self.max_restarts = restarts;
        self
    }

    pub fn validate(&self) -> Result<(), InverseError> {
        let n = self.target.chain_len();
        let required = n / 2;
        if self.pins.len() != required {
            return Err(InverseError::PinCount { expected: required, got: self.pins.len() });
        }
        for (&index, &value) in &self.pins {
            if index == 0 || index > n {
                return Err(InverseError::PinIndex { index, n });
            }
            if !(value > 0.0 && value.is_finite()) {
                return Err(InverseError::PinValue { index, value });
            }
        }
        if let Some(g) = &self.initial_guess {
            if g.len() != n {
                return Err(InverseError::DimensionMismatch { couplings: g.len(), levels: self.target.len() });
            }
        }
        if self.target.max_abs() == 0.0 && n > 0 {
            return Err(InverseError::DegenerateTarget);
        }
        Ok(())
    }
}

/// Outcome of [`newton_solve`].
///
/// `residual_norm` is the largest coefficient mismatch after scaling the
/// energies to unit maximum and dividing row `j` by `max(1, |Λ_target^j|)`.
#[derive(Debug, Clone)]
pub struct SolveResult {
    pub couplings: ChainCouplings,
    pub residual_norm: f64,
    pub iterations: usize,
    pub restarts_used: usize,
}

/// Residual floor above which a failure is attributed to the pins.
const INFEASIBLE_FLOOR: f64 = 1e-6;
const MAX_HALVINGS: usize = 40;
/// Coefficient residual below which the eigenvalue polish takes over.
const POLISH_FROM: f64 = 1e-3;

struct System {
    n: usize,
    free: Vec<usize>,
    fixed: Vec<(usize, f64)>,
    orders: Vec<usize>,
    goal: Vec<f64>,
    weights: Vec<f64>,
    positive: Vec<f64>,
}

impl System {
    /// Normalizes `target` to unit maximum; `pins` are 0-based indices with
    /// squared, normalized values.
    fn build(target: &SymmetricSpectrum, fixed: Vec<(usize, f64)>) -> Self {
        let n = target.chain_len();
        let rho = target.max_abs();
        let normalized: Vec<f64> = target.values().iter().map(|e| e / rho).collect();
        let goal = expand_roots(&normalized);
        let orders = active_orders(n);
        let weights = orders.iter().map(|&j| 1.0 / goal[j].abs().max(1.0)).collect();
        let free = (0..n).filter(|m| fixed.iter().all(|p| p.0 != *m)).collect();
        let half = n + 1 - (n + 1) / 2;
        let positive = normalized[half..].to_vec();
        Self { n, free, fixed, orders, goal, weights, positive }
    }

    fn full(&self, u: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; self.n];
        for (&m, &v) in self.free.iter().zip(u) {
            x[m] = v;
        }
        for &(m, v) in &self.fixed {
            x[m] = v;
        }
        x
    }

    fn residual(&self, u: &[f64]) -> Vec<f64> {
        let c = crate::spectral::coeffs_from_squares(&self.full(u));
        self.orders
            .iter()
            .zip(&self.weights)
            .map(|(&j, w)| w * (c[j] - self.goal[j]))
            .collect()
    }

    fn residual_and_jacobian(&self, u: &[f64]) -> (Vec<f64>, DMatrix<f64>) {
        let (c, grad) = coeffs_with_gradient(&self.full(u));
        let rows = self.orders.len();
        let mut jac = DMatrix::zeros(rows, self.free.len());
        let mut r = Vec::with_capacity(rows);
        for (i, (&j, w)) in self.orders.iter().zip(&self.weights).enumerate() {
            r.push(w * (c[j] - self.goal[j]));
            for (col, &m) in self.free.iter().enumerate() {
                jac[(i, col)] = w * grad[m][j];
            }
        }
        (r, jac)
    }

    /// Damped (Gauss-)Newton from `u`. Returns the final residual norm,
    /// whether it reached `tol`, and the number of steps taken.
    fn descend(&self, u: &mut Vec<f64>, max_iterations: usize, tol: f64) -> (f64, bool, usize) {
        // steps must decrease the Euclidean norm (the Gauss-Newton merit);
        // convergence is judged on the largest entry
        let r0 = self.residual(u);
        let mut merit = euclid(&r0);
        let mut norm = max_abs(&r0);
        let mut steps = 0;
        for _ in 0..max_iterations {
            if norm <= tol {
                return (norm, true, steps);
            }
            steps += 1;
            let (r, jac) = self.residual_and_jacobian(u);
            let Some(step) = solve_step(jac, &r) else { break };
            let mut t = 1.0;
            let mut accepted = false;
            for _ in 0..=MAX_HALVINGS {
                let cand: Vec<f64> = u.iter().zip(step.iter()).map(|(a, d)| a + t * d).collect();
                if cand.iter().all(|&v| v > 0.0) {
                    let rc = self.residual(&cand);
                    let mc = euclid(&rc);
                    if mc < merit * (1.0 - 1e-4 * t) {
                        *u = cand;
                        merit = mc;
                        norm = max_abs(&rc);
                        accepted = true;
                        break;
                    }
                }
                t *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        (norm, norm <= tol, steps)
    }

    /// Positive eigenvalues (ascending) of the chain at `u`, with the
    /// eigensystem and couplings they came from.
    fn levels(&self, u: &[f64]) -> Option<(Vec<f64>, EigenSystem, ChainCouplings)> {
        let k = self.positive.len();
        let chain = ChainCouplings::from_squares(&self.full(u)).ok()?;
        let eig = eig_jacobi(&chain);
        let size = eig.size();
        let e = (0..k).map(|i| eig.energy(size - k + i)).collect();
        Some((e, eig, chain))
    }

    /// Newton on the positive eigenvalues towards `goal`, using
    /// `∂E/∂(F_m²) = φ_m φ_{m+1} / F_m`. The iteration runs in `ln F_m²`,
    /// which keeps couplings positive and, when there are more free
    /// couplings than levels, makes the minimum-norm step a smallest
    /// relative change. Returns the final largest mismatch.
    fn eigen_correct(&self, u: &mut Vec<f64>, goal: &[f64], max_iterations: usize, tol: f64) -> f64 {
        let k = goal.len();
        let Some((mut e, mut eig, mut chain)) = self.levels(u) else { return f64::INFINITY };
        let mismatch = |e: &[f64]| e.iter().zip(goal).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        let mut norm = mismatch(&e);
        for _ in 0..max_iterations {
            if norm <= tol {
                break;
            }
            let size = eig.size();
            let f = chain.values();
            let jac = DMatrix::from_fn(k, self.free.len(), |i, col| {
                let m = self.free[col];
                let level = size - k + i;
                u[col] * eig.component(m, level) * eig.component(m + 1, level) / f[m]
            });
            let r: Vec<f64> = e.iter().zip(goal).map(|(a, b)| a - b).collect();
            let Some(step) = solve_step(jac, &r) else { break };
            let mut t = 1.0;
            let mut accepted = false;
            for _ in 0..=MAX_HALVINGS {
                let cand: Vec<f64> = u.iter().zip(step.iter()).map(|(a, d)| a * (t * d).exp()).collect();
                if cand.iter().all(|&v| v > 0.0 && v.is_finite()) {
                    if let Some((ec, gc, cc)) = self.levels(&cand) {
                        let nc = mismatch(&ec);
                        if nc < norm {
                            *u = cand;
                            (e, eig, chain, norm) = (ec, gc, cc, nc);
                            accepted = true;
                            break;
                        }
                    }
                }
                t *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        norm
    }

    /// Eigenvalue Newton to the target levels, used to remove the
    /// root-conditioning loss left after the coefficient iteration.
    fn polish(&self, u: &mut Vec<f64>) {
        if self.positive.is_empty() || self.free.is_empty() {
            return;
        }
        let goal = self.positive.clone();
        self.eigen_correct(u, &goal, 40, 1e-15);
    }

    /// Follows the straight path from the levels at `u` to the target
    /// levels, correcting with eigenvalue Newton at each step and shrinking
    /// the step when a correction fails. Leaves `u` near the target on
    /// success.
    fn homotopy(&self, u: &mut Vec<f64>) -> bool {
        if self.positive.is_empty() || self.free.is_empty() {
            return false;
        }
        let Some((start, _, _)) = self.levels(u) else { return false };
        let (mut t, mut dt) = (0.0f64, 0.1f64);
        while t < 1.0 {
            let next = (t + dt).min(1.0);
            let goal: Vec<f64> =
                start.iter().zip(&self.positive).map(|(a, b)| (1.0 - next) * a + next * b).collect();
            let mut trial = u.clone();
            if self.eigen_correct(&mut trial, &goal, 30, 1e-11) <= 1e-11 {
                *u = trial;
                t = next;
                dt = (dt * 1.5).min(0.25);
            } else {
                dt *= 0.5;
                if dt < 1e-6 {
                    return false;
                }
            }
        }
        true
    }

    /// Polishes, then accepts `u` if the scaled residual is within `tol`
    /// and the forward spectrum matches.
    fn finish(&self, u: &mut Vec<f64>, target: &SymmetricSpectrum, tol: f64) -> Option<(ChainCouplings, f64)> {
        self.polish(u);
        let norm = max_abs(&self.residual(u));
        if norm > tol {
            return None;
        }
        let rho = target.max_abs();
        let x = self.full(u);
        let couplings = ChainCouplings::new(x.iter().map(|v| v.sqrt() * rho).collect()).ok()?;
        let spectrum = eig_jacobi(&couplings).spectrum;
        let mismatch = spectrum
            .values()
            .iter()
            .zip(target.values())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        (mismatch <= 1e-8 * rho).then_some((couplings, norm))
    }
}

/// Newton step `J δ = -r`; LU for square systems, minimum-norm least
/// squares otherwise or when LU breaks down.
fn solve_step(jac: DMatrix<f64>, r: &[f64]) -> Option<DVector<f64>> {
    let rhs = DVector::from_iterator(r.len(), r.iter().map(|v| -v));
    let finite = |s: &DVector<f64>| s.iter().all(|v| v.is_finite());
    if jac.is_square() {
        if let Some(s) = jac.clone().lu().solve(&rhs) {
            if finite(&s) {
                return Some(s);
            }
        }
    }
    let svd = jac.svd(true, true);
    let eps = svd.singular_values.max() * 1e-13;
    svd.solve(&rhs, eps).ok().filter(finite)
}

fn euclid(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn log_uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    (rng.random_range(lo.ln()..hi.ln())).exp()
}

/// Solves for the unpinned couplings by damped Newton iteration on the
/// coefficient system, with random restarts.
///
/// Unknowns are the squared couplings. Each step is halved (up to 40
/// times) until all unknowns stay positive and the residual decreases;
/// when that fails, or the iteration budget runs out, the solver restarts
/// from a log-uniform random point in `[10⁻² ρ², ρ²]`, `ρ = max|E|`.
pub fn newton_solve(problem: &InverseProblem) -> Result<SolveResult, InverseError> {
    problem.validate()?;
    let n = problem.target.chain_len();
    if n == 0 {
        return Ok(SolveResult {
            couplings: ChainCouplings::new(vec![])?,
            residual_norm: 0.0,
            iterations: 0,
            restarts_used: 0,
        });
    }
    let rho2 = problem.target.max_abs().powi(2);
    let fixed = problem.pins.iter().map(|(&i, &f)| (i - 1, f * f / rho2)).collect();
    let system = System::build(&problem.target, fixed);

    // Σ x_n equals the sum of squared positive energies.
    let budget: f64 = system.positive.iter().map(|e| e * e).sum();
    let pinned: f64 = system.fixed.iter().map(|p| p.1).sum();
    if pinned >= budget {
        return Err(InverseError::InfeasiblePins { best_residual: f64::INFINITY });
    }

    let tol = problem.tolerance;
    let mut best = f64::INFINITY;
    let mut iterations = 0;
    for restart in 0..=problem.max_restarts {
        let mut rng = rng::stream(problem.seed, "newton", restart as u64);
        let mut u: Vec<f64> = match (&problem.initial_guess, restart) {
            (Some(g), 0) => system.free.iter().map(|&m| g.values()[m].powi(2) / rho2).collect(),
            _ => {
                let raw: Vec<f64> = system.free.iter().map(|_| log_uniform(&mut rng, 1e-2, 1.0)).collect();
                // rescale onto the sum-rule hyperplane, which is linear in x
                let total: f64 = raw.iter().sum();
                raw.iter().map(|v| v * (budget - pinned) / total).collect()
            }
        };
        let (norm, converged, steps) = system.descend(&mut u, problem.max_iterations, tol);
        iterations += steps;
        best = best.min(norm);
        // the coefficient system loses accuracy near clustered levels; the
        // eigenvalue Newton finishes from a nearby point
        if !converged && norm > POLISH_FROM {
            continue;
        }
        if let Some((couplings, residual_norm)) = system.finish(&mut u, &problem.target, tol) {
            // pins come back exactly as given, not through F² / ρ²
            let mut values = couplings.into_values();
            for (&i, &f) in &problem.pins {
                values[i - 1] = f;
            }
            let couplings = ChainCouplings::new(values)?;
            return Ok(SolveResult { couplings, residual_norm, iterations, restarts_used: restart });
        }
    }
    if best > INFEASIBLE_FLOOR {
        Err(InverseError::InfeasiblePins { best_residual: best })
    } else {
        Err(InverseError::NoConvergence { best_residual: best, restarts: problem.max_restarts })
    }
}

/// Moves the squared couplings `start` onto the isospectral surface of
/// `target` by minimum-norm Gauss-Newton steps on the coefficient system,
/// all couplings free, then polishes. `None` when the iteration stalls.
pub(crate) fn project_to_surface(target: &SymmetricSpectrum, start: &[f64], tol: f64) -> Option<ChainCouplings> {
    let rho2 = target.max_abs().powi(2);
    let system = System::build(target, Vec::new());
    let mut u: Vec<f64> = start.iter().map(|x| x / rho2).collect();
    let (norm, converged, _) = system.descend(&mut u, 200, tol);
    if !converged && norm > POLISH_FROM {
        return None;
    }
    system.finish(&mut u, target, tol).map(|r| r.0)
}

/// Carries `start` onto the surface along the level homotopy instead:
/// slower, but it does not stall on clustered levels.
pub(crate) fn follow_levels(target: &SymmetricSpectrum, start: &[f64], tol: f64) -> Option<ChainCouplings> {
    let rho2 = target.max_abs().powi(2);
    let system = System::build(target, Vec::new());
    let mut u: Vec<f64> = start.iter().map(|x| x / rho2).collect();
    if !system.homotopy(&mut u) {
        return None;
    }
    system.finish(&mut u, target, tol).map(|r| r.0)
}
