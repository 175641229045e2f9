use rayon::prelude::*;

use super::GridDomain;

/// Symmetric matrix in compressed sparse row form.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<f64>,
    /// Grid spacing, for the mesh inner product.
    h: f64,
}

/// The 5-point `−∇²` with zero Dirichlet data: `4/h²` on the diagonal and
/// `−1/h²` between neighbouring interior nodes.
pub fn assemble_laplacian(domain: &GridDomain) -> SparseOperator {
    let n = domain.unknowns();
    let h2 = domain.h() * domain.h();
    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut cols = Vec::with_capacity(5 * n);
    let mut values = Vec::with_capacity(5 * n);
    row_ptr.push(0);
    for u in 0..n {
        let mut row: Vec<(usize, f64)> = domain.neighbours(u).map(|v| (v, -1.0 / h2)).collect();
        row.push((u, 4.0 / h2));
        row.sort_by_key(|e| e.0);
        for (c, v) in row {
            cols.push(c);
            values.push(v);
        }
        row_ptr.push(cols.len());
    }
    SparseOperator { dim: n, row_ptr, cols, values, h: domain.h() }
}

impl SparseOperator {
    /// Builds an operator from `(row, col, value)` triplets; duplicates are
    /// summed. Symmetry is the caller's responsibility.
    pub fn from_triplets(dim: usize, h: f64, triplets: &[(usize, usize, f64)]) -> Self {
        let mut sorted = triplets.to_vec();
        sorted.sort_by_key(|t| (t.0, t.1));
        let mut row_ptr = vec![0; dim + 1];
        let mut cols = Vec::new();
        let mut values: Vec<f64> = Vec::new();
        let mut last = None;
        for (r, c, v) in sorted {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
                continue;
            }
            cols.push(c);
            values.push(v);
            row_ptr[r + 1] += 1;
            last = Some((r, c));
        }
        for i in 0..dim {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self { dim, row_ptr, cols, values, h }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[range.clone()].iter().copied().zip(self.values[range].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.row(i).find(|e| e.0 == j).map_or(0.0, |e| e.1)
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// `y = A x`; rows are independent, so the product is the same for any
    /// thread count.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        (0..self.dim).into_par_iter().map(|i| self.row(i).map(|(j, v)| v * x[j]).sum()).collect()
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.dim).all(|i| self.row(i).all(|(j, v)| self.get(j, i) == v))
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut a = vec![0.0; self.dim * self.dim];
        for i in 0..self.dim {
            for (j, v) in self.row(i) {
                a[i * self.dim + j] = v;
            }
        }
        a
    }
}
