//! Preconditioned conjugate gradients with a Lanczos condition-number estimate.

use serde::Serialize;

use super::sparse::SparseSymmetric;
use super::SolverError;

/// Symmetric positive preconditioner application `z = M^-1 r`.
pub trait Preconditioner {
    fn apply(&self, r: &[f64], z: &mut [f64]);
}

/// `M = I`.
pub struct IdentityPreconditioner;

impl Preconditioner for IdentityPreconditioner {
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        z.copy_from_slice(r);
    }
}

/// Outcome of a PCG solve.
#[derive(Debug, Clone, Serialize)]
pub struct PcgResult {
    #[serde(skip)]
    pub solution: Vec<f64>,
    pub iterations: usize,
    /// `||r_k|| / ||b||` after each iteration.
    pub residual_history: Vec<f64>,
    /// Step lengths, one per iteration.
    #[serde(skip)]
    pub alphas: Vec<f64>,
    /// Direction updates, one per iteration after the first.
    #[serde(skip)]
    pub betas: Vec<f64>,
    /// Spectral condition estimate from the Lanczos tridiagonal.
    pub kappa: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Solve `A x = b` to `||r||/||b|| <= tol` starting from zero.
pub fn pcg(
    a: &SparseSymmetric,
    b: &[f64],
    m: &dyn Preconditioner,
    tol: f64,
    max_iter: usize,
) -> Result<PcgResult, SolverError> {
    let n = a.dim();
    assert_eq!(b.len(), n);
    let b_norm = norm(b);
    let mut x = vec![0.0; n];
    if b_norm == 0.0 || n == 0 {
        return Ok(PcgResult {
            solution: x,
            iterations: 0,
            residual_history: Vec::new(),
            alphas: Vec::new(),
            betas: Vec::new(),
            kappa: 1.0,
        });
    }

    let mut r = b.to_vec();
    let mut z = vec![0.0; n];
    m.apply(&r, &mut z);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];

    let mut alphas = Vec::new();
    let mut betas = Vec::new();
    let mut history = Vec::new();

    for k in 1..=max_iter {
        a.matvec(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            return Err(SolverError::Breakdown { value: pap });
        }
        let alpha = rz / pap;
        alphas.push(alpha);
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rel = norm(&r) / b_norm;
        history.push(rel);
        if rel <= tol {
            let kappa = lanczos_kappa(&alphas, &betas);
            return Ok(PcgResult {
                solution: x,
                iterations: k,
                residual_history: history,
                alphas,
                betas,
                kappa,
            });
        }
        m.apply(&r, &mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        betas.push(beta);
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
        rz = rz_new;
    }

    Err(SolverError::NoConvergence {
        iterations: max_iter,
        relative_residual: *history.last().unwrap(),
    })
}

/// Eigenvalue ratio of the Lanczos tridiagonal recovered from the PCG
/// coefficients.
fn lanczos_kappa(alphas: &[f64], betas: &[f64]) -> f64 {
    let k = alphas.len();
    if k == 0 {
        return 1.0;
    }
    let mut t = nalgebra::DMatrix::zeros(k, k);
    t[(0, 0)] = 1.0 / alphas[0];
    for i in 1..k {
        t[(i, i)] = 1.0 / alphas[i] + betas[i - 1] / alphas[i - 1];
        let off = betas[i - 1].sqrt() / alphas[i - 1];
        t[(i, i - 1)] = off;
        t[(i - 1, i)] = off;
    }
    let eigs = t.symmetric_eigenvalues();
    let lmax = eigs.iter().cloned().fold(f64::MIN, f64::max);
    let lmin = eigs.iter().cloned().fold(f64::MAX, f64::min);
    if lmin <= 0.0 {
        // Theoretically impossible for SPD inputs; round-off guard.
        return f64::INFINITY;
    }
    (lmax / lmin).max(1.0)
}

/// Condition estimate from a finished solve. At least one iteration must have
/// been recorded; a single iteration gives the trivial estimate 1.
pub fn estimate_condition(result: &PcgResult) -> Result<f64, SolverError> {
    if result.alphas.is_empty() {
        return Err(SolverError::InsufficientData);
    }
    Ok(lanczos_kappa(&result.alphas, &result.betas))
}
