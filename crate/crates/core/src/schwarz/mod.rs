//! Sparse SPD linear algebra and the two-level additive Schwarz preconditioner.
//!
//! The preconditioner applies `R0^T A0^-1 R0 + sum_i R_i^T A_i^-1 R_i` where
//! `A0 = R0 A R0^T` is the coarse operator over the subdomain-vertex basis and
//! each `A_i` is the principal block of `A` on the interior dofs of an
//! overlapping subdomain. All subspace solves are exact (sparse Cholesky).

mod cholesky;
mod ordering;
mod pcg;
mod preconditioner;
mod sparse;

pub use cholesky::{factorize_spd, SpdFactor};
pub use pcg::{estimate_condition, pcg, IdentityPreconditioner, PcgResult, Preconditioner};
pub use preconditioner::{build_preconditioner, SchwarzPreconditioner};
pub use sparse::SparseSymmetric;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("matrix is not positive definite (pivot {pivot} is non-positive)")]
    NotPositiveDefinite { pivot: usize },
    #[error("PCG did not converge in {iterations} iterations (relative residual {relative_residual:.3e})")]
    NoConvergence { iterations: usize, relative_residual: f64 },
    #[error("PCG breakdown: p^T A p = {value:.3e} <= 0; inputs are not SPD")]
    Breakdown { value: f64 },
    #[error("condition estimate needs at least one recorded iteration")]
    InsufficientData,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
