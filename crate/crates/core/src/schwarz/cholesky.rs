//! Sparse Cholesky factorization of symmetric positive-definite matrices.
//!
//! Up-looking `L L^T` factorization over the elimination tree, after a
//! fill-reducing minimum-degree permutation. The factor is stored by columns
//! so both triangular solves stream through memory.

use super::ordering::min_degree;
use super::sparse::SparseSymmetric;
use super::SolverError;

/// Cholesky factor of `P A P^T`.
#[derive(Debug, Clone)]
pub struct SpdFactor {
    dim: usize,
    /// perm[k] = original index eliminated at step k.
    perm: Vec<usize>,
    // L in compressed column form; the diagonal entry leads each column.
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    values: Vec<f64>,
}

/// Factorize a symmetric positive-definite matrix.
pub fn factorize_spd(a: &SparseSymmetric) -> Result<SpdFactor, SolverError> {
    let n = a.dim();
    let perm = min_degree(&a.adjacency());
    let mut iperm = vec![0usize; n];
    for (k, &v) in perm.iter().enumerate() {
        iperm[v] = k;
    }

    // Permuted matrix, lower triangle rows (= upper-triangle columns).
    let triplets: Vec<(usize, usize, f64)> =
        a.lower_entries().map(|(i, j, v)| (iperm[i], iperm[j], v)).collect();
    let ap = SparseSymmetric::from_triplets(n, &triplets);

    // Elimination tree.
    let mut parent = vec![usize::MAX; n];
    let mut ancestor = vec![usize::MAX; n];
    for k in 0..n {
        let (cols, _) = ap.lower_row(k);
        for &j in cols {
            let mut i = j;
            while i != usize::MAX && i < k {
                let next = ancestor[i];
                ancestor[i] = k;
                if next == usize::MAX {
                    parent[i] = k;
                }
                i = next;
            }
        }
    }

    // Symbolic: row patterns of L via elimination-tree reach, stored flat.
    let mut row_ptr = vec![0usize; n + 1];
    let mut patterns: Vec<usize> = Vec::new();
    let mut mark = vec![usize::MAX; n];
    for k in 0..n {
        mark[k] = k;
        let (cols, _) = ap.lower_row(k);
        let start = patterns.len();
        for &j in cols {
            let mut i = j;
            while i != usize::MAX && i < k && mark[i] != k {
                mark[i] = k;
                patterns.push(i);
                i = parent[i];
            }
        }
        patterns[start..].sort_unstable();
        row_ptr[k + 1] = patterns.len();
    }

    // Column counts -> column pointers (diagonal first in each column).
    let mut col_count = vec![1usize; n];
    for &j in &patterns {
        col_count[j] += 1;
    }
    let mut col_ptr = vec![0usize; n + 1];
    for j in 0..n {
        col_ptr[j + 1] = col_ptr[j] + col_count[j];
    }
    let nnz = col_ptr[n];
    let mut row_idx = vec![0usize; nnz];
    let mut values = vec![0.0f64; nnz];
    let mut col_len = vec![0usize; n]; // entries filled so far, diagonal included

    // Numeric up-looking pass.
    let mut x = vec![0.0f64; n];
    for k in 0..n {
        let (cols, vals) = ap.lower_row(k);
        let mut d = 0.0;
        for (&j, &v) in cols.iter().zip(vals) {
            if j == k {
                d = v;
            } else {
                x[j] = v;
            }
        }
        for &j in &patterns[row_ptr[k]..row_ptr[k + 1]] {
            let pj = col_ptr[j];
            let lkj = x[j] / values[pj];
            x[j] = 0.0;
            for p in pj + 1..pj + col_len[j] {
                x[row_idx[p]] -= values[p] * lkj;
            }
            d -= lkj * lkj;
            // append L[k, j] to column j
            let dst = pj + col_len[j];
            row_idx[dst] = k;
            values[dst] = lkj;
            col_len[j] += 1;
        }
        if d <= 0.0 {
            return Err(SolverError::NotPositiveDefinite { pivot: perm[k] });
        }
        let pk = col_ptr[k];
        row_idx[pk] = k;
        values[pk] = d.sqrt();
        col_len[k] = 1;
    }

    Ok(SpdFactor { dim: n, perm, col_ptr, row_idx, values })
}

impl SpdFactor {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of stored entries of `L`.
    pub fn nnz(&self) -> usize {
        self.row_idx.len()
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    /// Solve `A x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.dim);
        let mut x: Vec<f64> = (0..self.dim).map(|k| b[self.perm[k]]).collect();
        self.solve_permuted_in_place(&mut x);
        let mut out = vec![0.0; self.dim];
        for k in 0..self.dim {
            out[self.perm[k]] = x[k];
        }
        out
    }

    /// Solve on an already-permuted right-hand side, reusing its storage.
    fn solve_permuted_in_place(&self, x: &mut [f64]) {
        let n = self.dim;
        // L y = b
        for j in 0..n {
            let pj = self.col_ptr[j];
            let xj = x[j] / self.values[pj];
            x[j] = xj;
            for p in pj + 1..self.col_ptr[j + 1] {
                x[self.row_idx[p]] -= self.values[p] * xj;
            }
        }
        // L^T x = y
        for j in (0..n).rev() {
            let pj = self.col_ptr[j];
            let mut s = x[j];
            for p in pj + 1..self.col_ptr[j + 1] {
                s -= self.values[p] * x[self.row_idx[p]];
            }
            x[j] = s / self.values[pj];
        }
    }

    /// Reconstruct `(P A P^T)[i][j]` from the factor, for verification.
    pub fn reconstruct_permuted(&self, i: usize, j: usize) -> f64 {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        // (L L^T)[r][c] = sum_k L[r,k] L[c,k]
        let mut s = 0.0;
        for k in 0..=c {
            let mut lr = 0.0;
            let mut lc = 0.0;
            for p in self.col_ptr[k]..self.col_ptr[k + 1] {
                if self.row_idx[p] == r {
                    lr = self.values[p];
                }
                if self.row_idx[p] == c {
                    lc = self.values[p];
                }
            }
            s += lr * lc;
        }
        s
    }
}
