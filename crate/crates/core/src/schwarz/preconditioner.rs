//! Two-level additive Schwarz preconditioner with exact subspace solves.

use crate::coarse::CoarseBasis;
use crate::decomp::OverlapSets;

use super::cholesky::{factorize_spd, SpdFactor};
use super::pcg::Preconditioner;
use super::sparse::SparseSymmetric;
use super::SolverError;

struct LocalBlock {
    dofs: Vec<usize>,
    factor: SpdFactor,
}

/// Sparse coarse columns over the free dofs.
type CoarseColumns = Vec<Vec<(usize, f64)>>;

/// `A_ad^-1 = R0^T (R0 A R0^T)^-1 R0 + sum_i R_i^T (R_i A R_i^T)^-1 R_i`.
///
/// The local restriction operators are never assembled; each block is the
/// principal submatrix of `A` on the interior dofs of an overlapping
/// subdomain.
pub struct SchwarzPreconditioner {
    dim: usize,
    coarse: Option<(CoarseColumns, SpdFactor)>,
    coarse_operator: Option<SparseSymmetric>,
    locals: Vec<LocalBlock>,
}

/// Form and factorize the coarse operator and all local blocks.
pub fn build_preconditioner(
    a: &SparseSymmetric,
    overlap: &OverlapSets,
    coarse_basis: &CoarseBasis,
) -> Result<SchwarzPreconditioner, SolverError> {
    let n = a.dim();
    let mut coarse_operator = None;
    let coarse = if coarse_basis.is_empty() {
        None
    } else {
        let columns = coarse_basis.columns().to_vec();
        let nc = columns.len();
        // A0 = R0 A R0^T by columns: w = A phi_q, then A0[p][q] = phi_p . w
        let mut dense_col = vec![0.0; n];
        let mut w = vec![0.0; n];
        let mut triplets = Vec::new();
        for (q, col_q) in columns.iter().enumerate() {
            dense_col.fill(0.0);
            for &(i, v) in col_q {
                dense_col[i] = v;
            }
            a.matvec(&dense_col, &mut w);
            for (p, col_p) in columns.iter().enumerate().take(q + 1) {
                let s: f64 = col_p.iter().map(|&(i, v)| v * w[i]).sum();
                if s != 0.0 {
                    triplets.push((q, p, s));
                }
            }
        }
        let a0 = SparseSymmetric::from_triplets(nc, &triplets);
        let factor = factorize_spd(&a0)?;
        coarse_operator = Some(a0);
        Some((columns, factor))
    };

    let mut locals = Vec::with_capacity(overlap.subdomain_count());
    for i in 0..overlap.subdomain_count() {
        let dofs = overlap.interior_dofs(i).to_vec();
        if dofs.is_empty() {
            continue;
        }
        let block = a.submatrix(&dofs);
        let factor = factorize_spd(&block)?;
        locals.push(LocalBlock { dofs, factor });
    }

    Ok(SchwarzPreconditioner { dim: n, coarse, coarse_operator, locals })
}

impl SchwarzPreconditioner {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Dimension of the coarse space (0 for the one-level method).
    pub fn coarse_dim(&self) -> usize {
        self.coarse.as_ref().map_or(0, |(c, _)| c.len())
    }

    /// The assembled coarse operator `A0 = R0 A R0^T`, for inspection and
    /// MatrixMarket export.
    pub fn coarse_operator(&self) -> Option<&SparseSymmetric> {
        self.coarse_operator.as_ref()
    }
}

impl Preconditioner for SchwarzPreconditioner {
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        assert_eq!(r.len(), self.dim);
        z.fill(0.0);

        if let Some((columns, factor)) = &self.coarse {
            let rc: Vec<f64> = columns
                .iter()
                .map(|col| col.iter().map(|&(i, v)| v * r[i]).sum())
                .collect();
            let yc = factor.solve(&rc);
            for (col, &y) in columns.iter().zip(&yc) {
                for &(i, v) in col {
                    z[i] += v * y;
                }
            }
        }

        for block in &self.locals {
            let rb: Vec<f64> = block.dofs.iter().map(|&i| r[i]).collect();
            let xb = block.factor.solve(&rb);
            for (&i, &x) in block.dofs.iter().zip(&xb) {
                z[i] += x;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schwarz::pcg;

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
    fn single_covering_subdomain_is_exact() {
        let n = 12;
        let a = laplacian_1d(n);
        let overlap = OverlapSets::from_raw(vec![(0..n).collect()], 1, 1.0);
        let basis = CoarseBasis::empty();
        let m = build_preconditioner(&a, &overlap, &basis).unwrap();
        let b: Vec<f64> = (0..n).map(|i| (i as f64 * 0.7).cos()).collect();
        let res = pcg(&a, &b, &m, 1e-6, 50).unwrap();
        assert_eq!(res.iterations, 1);
        let direct = crate::schwarz::factorize_spd(&a).unwrap().solve(&b);
        for i in 0..n {
            assert!((res.solution[i] - direct[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn coarse_operator_is_exported() {
        let n = 20;
        let a = laplacian_1d(n);
        let overlap = OverlapSets::from_raw(vec![(0..12).collect(), (8..20).collect()], 1, 0.5);
        let col: Vec<(usize, f64)> = (5..15).map(|i| (i, 1.0)).collect();
        let basis = CoarseBasis::from_columns(vec![10], vec![col]);
        let m = build_preconditioner(&a, &overlap, &basis).unwrap();
        let a0 = m.coarse_operator().unwrap();
        assert_eq!(a0.dim(), 1);
        // phi^T A phi for the indicator of 5..15 on the 1D Laplacian: 2.
        assert!((a0.get(0, 0) - 2.0).abs() < 1e-12);
        let mut buf = Vec::new();
        a0.write_matrix_market(&mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("%%MatrixMarket"));
    }

    #[test]
    fn apply_is_symmetric() {
        let n = 20;
        let a = laplacian_1d(n);
        let overlap = OverlapSets::from_raw(vec![(0..12).collect(), (8..20).collect()], 1, 0.5);
        let col: Vec<(usize, f64)> = (5..15).map(|i| (i, 1.0 - (i as f64 - 10.0).abs() / 5.0)).collect();
        let basis = CoarseBasis::from_columns(vec![10], vec![col]);
        let m = build_preconditioner(&a, &overlap, &basis).unwrap();

        let u: Vec<f64> = (0..n).map(|i| crate::rng::symmetric(1, i as u64)).collect();
        let v: Vec<f64> = (0..n).map(|i| crate::rng::symmetric(2, i as u64)).collect();
        let mut mu = vec![0.0; n];
        let mut mv = vec![0.0; n];
        m.apply(&u, &mut mu);
        m.apply(&v, &mut mv);
        let umv: f64 = u.iter().zip(&mv).map(|(a, b)| a * b).sum();
        let vmu: f64 = v.iter().zip(&mu).map(|(a, b)| a * b).sum();
        assert!((umv - vmu).abs() < 1e-12 * umv.abs().max(1.0));
    }
}
