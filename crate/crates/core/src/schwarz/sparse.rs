//! Sparse symmetric matrix storage.
//!
//! Only the lower triangle is stored, in compressed row form. Row indices are
//! kept sorted within each row so sub-block extraction against a sorted index
//! set stays lower-triangular.

use std::io::Write;

use super::SolverError;

/// Symmetric sparse matrix; compressed row storage of the lower triangle.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSymmetric {
    dim: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseSymmetric {
    /// Build from triplets; entries are mirrored into the lower triangle and
    /// duplicates summed in sorted coordinate order, so the result does not
    /// depend on the order triplets were pushed (stable sort keeps the
    /// accumulation order of equal coordinates fixed as well).
    pub fn from_triplets(dim: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut entries: Vec<(usize, usize, f64)> = triplets
            .iter()
            .map(|&(i, j, v)| if i >= j { (i, j, v) } else { (j, i, v) })
            .collect();
        entries.sort_by_key(|&(i, j, _)| (i, j));

        let mut last_row = Vec::with_capacity(entries.len());
        let mut col_idx: Vec<usize> = Vec::with_capacity(entries.len());
        let mut values: Vec<f64> = Vec::with_capacity(entries.len());
        for &(i, j, v) in &entries {
            debug_assert!(i < dim && j < dim);
            if last_row.last() == Some(&i) && col_idx.last() == Some(&j) {
                *values.last_mut().unwrap() += v;
            } else {
                last_row.push(i);
                col_idx.push(j);
                values.push(v);
            }
        }
        let mut row_ptr = vec![0usize; dim + 1];
        for &i in &last_row {
            row_ptr[i + 1] += 1;
        }
        for i in 0..dim {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self { dim, row_ptr, col_idx, values }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of stored (lower-triangle) entries.
    pub fn nnz_lower(&self) -> usize {
        self.col_idx.len()
    }

    /// Iterate stored entries `(i, j, v)` with `j <= i`.
    pub fn lower_entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.dim).flat_map(move |i| {
            (self.row_ptr[i]..self.row_ptr[i + 1]).map(move |k| (i, self.col_idx[k], self.values[k]))
        })
    }

    /// Stored lower-triangle row `i`: sorted column indices and values.
    pub fn lower_row(&self, i: usize) -> (&[usize], &[f64]) {
        let (a, b) = (self.row_ptr[i], self.row_ptr[i + 1]);
        (&self.col_idx[a..b], &self.values[a..b])
    }

    /// Entry `(i, j)`, searching the stored triangle.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        let (cols, vals) = self.lower_row(r);
        match cols.binary_search(&c) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    /// `y = A x` using the implicit upper triangle.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.dim);
        assert_eq!(y.len(), self.dim);
        y.fill(0.0);
        for i in 0..self.dim {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = self.col_idx[k];
                let v = self.values[k];
                y[i] += v * x[j];
                if i != j {
                    y[j] += v * x[i];
                }
            }
        }
    }

    /// Accumulate `y[idx] += A[idx, jdx] * x` for disjoint sorted index sets,
    /// where `x` is given on `jdx` via `x_of[j]`. Used for Schur-complement
    /// right-hand sides without forming rectangular blocks.
    pub fn accumulate_coupling(
        &self,
        in_rows: &[bool],
        row_local: &[usize],
        x_of: impl Fn(usize) -> Option<f64>,
        y: &mut [f64],
    ) {
        for i in 0..self.dim {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = self.col_idx[k];
                let v = self.values[k];
                if in_rows[i] {
                    if let Some(xj) = x_of(j) {
                        y[row_local[i]] += v * xj;
                    }
                }
                if i != j && in_rows[j] {
                    if let Some(xi) = x_of(i) {
                        y[row_local[j]] += v * xi;
                    }
                }
            }
        }
    }

    /// Principal sub-block `A[idx, idx]` for a sorted index set.
    pub fn submatrix(&self, idx: &[usize]) -> SparseSymmetric {
        debug_assert!(idx.windows(2).all(|w| w[0] < w[1]));
        let mut local = vec![usize::MAX; self.dim];
        for (li, &gi) in idx.iter().enumerate() {
            local[gi] = li;
        }
        let mut triplets = Vec::new();
        for &gi in idx {
            let li = local[gi];
            let (cols, vals) = self.lower_row(gi);
            for (&gj, &v) in cols.iter().zip(vals) {
                let lj = local[gj];
                if lj != usize::MAX {
                    triplets.push((li, lj, v));
                }
            }
        }
        SparseSymmetric::from_triplets(idx.len(), &triplets)
    }

    /// Adjacency lists of the matrix graph (both triangles, no diagonal).
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.dim];
        for (i, j, _) in self.lower_entries() {
            if i != j {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        adj
    }

    /// True when the matrix graph is connected (vacuously true for dim 0).
    pub fn is_connected(&self) -> bool {
        if self.dim == 0 {
            return true;
        }
        let adj = self.adjacency();
        let mut seen = vec![false; self.dim];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(i) = stack.pop() {
            for &j in &adj[i] {
                if !seen[j] {
                    seen[j] = true;
                    count += 1;
                    stack.push(j);
                }
            }
        }
        count == self.dim
    }

    /// Write in MatrixMarket coordinate format (1-based, lower triangle).
    pub fn write_matrix_market<W: Write>(&self, w: &mut W) -> Result<(), SolverError> {
        writeln!(w, "%%MatrixMarket matrix coordinate real symmetric")?;
        writeln!(w, "{} {} {}", self.dim, self.dim, self.nnz_lower())?;
        for (i, j, v) in self.lower_entries() {
            writeln!(w, "{} {} {:.17e}", i + 1, j + 1, v)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian_1d(n: usize) -> SparseSymmetric {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            if i > 0 {
                t.push((i, i - 1, -1.0));
            }
        }
        SparseSymmetric::from_triplets(n, &t)
    }

    #[test]
    fn triplet_order_does_not_matter() {
        let t1 = vec![(0, 0, 1.0), (1, 0, 2.0), (1, 1, 3.0), (1, 0, 0.5)];
        let t2 = vec![(1, 1, 3.0), (0, 1, 2.0), (0, 0, 1.0), (1, 0, 0.5)];
        let a = SparseSymmetric::from_triplets(2, &t1);
        let b = SparseSymmetric::from_triplets(2, &t2);
        assert_eq!(a, b);
        assert_eq!(a.get(1, 0), 2.5);
        assert_eq!(a.get(0, 1), 2.5);
    }

    #[test]
    fn matvec_matches_dense() {
        let a = laplacian_1d(6);
        let x: Vec<f64> = (0..6).map(|i| (i as f64).sin() + 1.0).collect();
        let mut y = vec![0.0; 6];
        a.matvec(&x, &mut y);
        for i in 0..6 {
            let mut want = 2.0 * x[i];
            if i > 0 {
                want -= x[i - 1];
            }
            if i + 1 < 6 {
                want -= x[i + 1];
            }
            assert!((y[i] - want).abs() < 1e-14);
        }
    }

    #[test]
    fn submatrix_picks_block() {
        let a = laplacian_1d(6);
        let idx = vec![1, 2, 3];
        let b = a.submatrix(&idx);
        assert_eq!(b.dim(), 3);
        assert_eq!(b.get(0, 0), 2.0);
        assert_eq!(b.get(1, 0), -1.0);
        assert_eq!(b.get(2, 0), 0.0);
    }

    #[test]
    fn connectivity_detects_decoupled_block() {
        let a = SparseSymmetric::from_triplets(4, &[(0, 0, 1.0), (1, 0, -0.5), (1, 1, 1.0), (2, 2, 1.0), (3, 2, -0.5), (3, 3, 1.0)]);
        assert!(!a.is_connected());
        assert!(laplacian_1d(4).is_connected());
    }

    #[test]
    fn matrix_market_header() {
        let a = laplacian_1d(2);
        let mut buf = Vec::new();
        a.write_matrix_market(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with("%%MatrixMarket matrix coordinate real symmetric\n"));
        assert!(s.contains("2 2 3"));
    }
}
