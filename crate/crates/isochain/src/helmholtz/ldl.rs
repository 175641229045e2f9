//! Envelope (skyline) `LDLᵀ` factorization with reverse Cuthill-McKee
//! ordering.
//!
//! Grid Laplacians on long thin guides have a bandwidth of about one guide
//! width after RCM, so the envelope stays small. No pivoting is done: the
//! factorization is exact for positive definite shifts and its pivot signs
//! give the inertia for indefinite ones.

use std::collections::VecDeque;

use super::SparseOperator;

/// Reverse Cuthill-McKee permutation: `perm[new] = old`.
pub fn rcm_order(op: &SparseOperator) -> Vec<usize> {
    let n = op.dim();
    let degree: Vec<usize> = (0..n).map(|i| op.row(i).filter(|e| e.0 != i).count()).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        let seed = (0..n).filter(|&i| !visited[i]).min_by_key(|&i| degree[i]).unwrap();
        let start = peripheral(op, seed, &visited);
        let mut queue = VecDeque::from([start]);
        visited[start] = true;
        while let Some(u) = queue.pop_front() {
            order.push(u);
            let mut next: Vec<usize> = op.row(u).map(|e| e.0).filter(|&v| v != u && !visited[v]).collect();
            next.sort_by_key(|&v| (degree[v], v));
            for v in next {
                visited[v] = true;
                queue.push_back(v);
            }
        }
    }
    order.reverse();
    order
}

/// Pseudo-peripheral node of the component of `start` (George-Liu): repeat
/// BFS from the farthest, lowest-degree node while the eccentricity grows.
fn peripheral(op: &SparseOperator, start: usize, excluded: &[bool]) -> usize {
    let mut node = start;
    let mut depth = 0;
    loop {
        let (far, d) = farthest(op, node, excluded);
        if d <= depth {
            return node;
        }
        node = far;
        depth = d;
    }
}

fn farthest(op: &SparseOperator, start: usize, excluded: &[bool]) -> (usize, usize) {
    let n = op.dim();
    let mut level = vec![usize::MAX; n];
    level[start] = 0;
    let mut queue = VecDeque::from([start]);
    let mut last = (start, 0);
    while let Some(u) = queue.pop_front() {
        let better = level[u] > last.1 || (level[u] == last.1 && op.row(u).count() < op.row(last.0).count());
        if better {
            last = (u, level[u]);
        }
        for (v, _) in op.row(u) {
            if !excluded[v] && level[v] == usize::MAX {
                level[v] = level[u] + 1;
                queue.push_back(v);
            }
        }
    }
    last
}

/// `P (A − σI) Pᵀ = L D Lᵀ` in envelope storage.
#[derive(Debug, Clone)]
pub struct SkylineLdl {
    perm: Vec<usize>,
    /// First stored column of each row.
    first: Vec<usize>,
    /// Start of each row in `lower`; row `i` holds columns `first[i]..i`.
    start: Vec<usize>,
    lower: Vec<f64>,
    diag: Vec<f64>,
}

impl SkylineLdl {
    /// Factors `A − shift·I` in the given ordering.
    pub fn factor(op: &SparseOperator, shift: f64, perm: Vec<usize>) -> Self {
        let n = op.dim();
        let mut inverse = vec![0; n];
        for (new, &old) in perm.iter().enumerate() {
            inverse[old] = new;
        }
        let first: Vec<usize> = (0..n)
            .map(|i| op.row(perm[i]).map(|(j, _)| inverse[j]).filter(|&j| j <= i).min().unwrap_or(i))
            .collect();
        let mut start = Vec::with_capacity(n + 1);
        start.push(0);
        for i in 0..n {
            start.push(start[i] + (i - first[i]));
        }
        let mut lower = vec![0.0; start[n]];
        let mut diag = vec![0.0; n];
        for i in 0..n {
            let mut a_ii = -shift;
            for (j, v) in op.row(perm[i]) {
                let j = inverse[j];
                if j < i {
                    lower[start[i] + j - first[i]] = v;
                } else if j == i {
                    a_ii += v;
                }
            }
            // row i first holds w_j = L_ij d_j, then L_ij
            for j in first[i]..i {
                let lo = first[i].max(first[j]);
                let mut s = lower[start[i] + j - first[i]];
                let (ri, rj) = (start[i] + lo - first[i], start[j] + lo - first[j]);
                for k in 0..j - lo {
                    s -= lower[ri + k] * lower[rj + k];
                }
                lower[start[i] + j - first[i]] = s;
            }
            let mut d = a_ii;
            for j in first[i]..i {
                let w = lower[start[i] + j - first[i]];
                let l = w / diag[j];
                d -= w * l;
                lower[start[i] + j - first[i]] = l;
            }
            diag[i] = d;
        }
        Self { perm, first, start, lower, diag }
    }

    /// Factors in RCM order.
    pub fn factor_rcm(op: &SparseOperator, shift: f64) -> Self {
        Self::factor(op, shift, rcm_order(op))
    }

    /// Stored entries below the diagonal.
    pub fn envelope(&self) -> usize {
        self.lower.len()
    }

    /// Number of negative pivots: by Sylvester's law, the number of
    /// eigenvalues of `A` below the shift.
    pub fn negative_pivots(&self) -> usize {
        self.diag.iter().filter(|&&d| d < 0.0).count()
    }

    pub fn min_abs_pivot(&self) -> f64 {
        self.diag.iter().fold(f64::INFINITY, |m, d| m.min(d.abs()))
    }

    /// Solves `(A − σI) x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.diag.len();
        let mut y: Vec<f64> = self.perm.iter().map(|&old| b[old]).collect();
        for i in 0..n {
            let row = &self.lower[self.start[i]..self.start[i + 1]];
            let s: f64 = row.iter().zip(&y[self.first[i]..i]).map(|(l, v)| l * v).sum();
            y[i] -= s;
        }
        for i in 0..n {
            y[i] /= self.diag[i];
        }
        for i in (0..n).rev() {
            let yi = y[i];
            let row = &self.lower[self.start[i]..self.start[i + 1]];
            for (k, l) in row.iter().enumerate() {
                y[self.first[i] + k] -= l * yi;
            }
        }
        let mut x = vec![0.0; n];
        for (new, &old) in self.perm.iter().enumerate() {
            x[old] = y[new];
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::helmholtz::{assemble_laplacian, GridDomain};
    use nalgebra::{DMatrix, DVector};

    fn corner_domain() -> GridDomain {
        // an L of two 3-node-wide arms on a 9-step grid
        let (cols, rows) = (10, 10);
        let mask: Vec<bool> = (0..rows).flat_map(|j| (0..cols).map(move |i| i < 3 || j < 3)).collect();
        GridDomain::new(mask, cols, rows, 1.0 / 8.0, 1.0, [0.0; 2]).unwrap()
    }

    #[test]
    fn rcm_is_a_permutation_and_narrows_the_envelope() {
        let a = assemble_laplacian(&GridDomain::strip(6.0, 1.0, 0.125).unwrap());
        let perm = rcm_order(&a);
        let mut sorted = perm.clone();
        sorted.sort();
        assert_eq!(sorted, (0..a.dim()).collect::<Vec<_>>());
        let natural = SkylineLdl::factor(&a, 0.0, (0..a.dim()).collect());
        let rcm = SkylineLdl::factor(&a, 0.0, perm);
        assert!(rcm.envelope() <= natural.envelope());
    }

    #[test]
    fn solves_match_dense() {
        let a = assemble_laplacian(&corner_domain());
        let n = a.dim();
        let dense = DMatrix::from_row_slice(n, n, &a.to_dense());
        let b: Vec<f64> = (0..n).map(|i| ((i * 7919) % 13) as f64 - 6.0).collect();
        for shift in [0.0, 50.0, 300.0] {
            let f = SkylineLdl::factor_rcm(&a, shift);
            let x = f.solve(&b);
            let shifted = &dense - DMatrix::identity(n, n) * shift;
            let r = &shifted * DVector::from_vec(x) - DVector::from_vec(b.clone());
            assert!(r.amax() < 1e-9 * b.iter().fold(0.0f64, |m, v| m.max(v.abs())) * 256.0, "shift {shift}");
        }
    }

    #[test]
    fn inertia_counts_eigenvalues() {
        let a = assemble_laplacian(&corner_domain());
        let n = a.dim();
        let eig = DMatrix::from_row_slice(n, n, &a.to_dense()).symmetric_eigenvalues();
        for shift in [10.0, 100.0, 250.0, 400.0] {
            let below = eig.iter().filter(|&&e| e < shift).count();
            assert_eq!(SkylineLdl::factor_rcm(&a, shift).negative_pivots(), below, "shift {shift}");
        }
    }
}
