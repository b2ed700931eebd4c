//! Discrete Laplace solves on subdomain faces.
//!
//! A subdomain face is a union of fine interface faces between two
//! subdomains, in general a non-planar discrete surface. Each fine face
//! contributes its 2D virtual element stiffness in its own plane frame
//! (consistency plus `h_f`-scaled nodal stabilization, unit coefficient);
//! assembly by shared nodes yields a surface Laplacian whose unknowns are the
//! face-component nodes, with Dirichlet data on everything else.

use super::CoarseError;
use crate::decomp::{InterfaceClassification, NodeClass, Partition};
use crate::mesh::PolyMesh3D;
use crate::schwarz::{factorize_spd, SolverError, SparseSymmetric, SpdFactor};
use crate::vem3d::FaceProjector;

/// Fine interface faces belonging to each face component, in one mesh pass.
pub(super) fn fine_faces_by_component(
    mesh: &PolyMesh3D,
    partition: &Partition,
    classification: &InterfaceClassification,
) -> Vec<Vec<usize>> {
    let face_cells = mesh.face_cells();
    let mut lists = vec![Vec::new(); classification.faces.len()];
    for (f, fc) in face_cells.iter().enumerate() {
        if fc[0] == usize::MAX || fc[1] >= usize::MAX - 1 {
            continue;
        }
        let s0 = partition.subdomain_of[fc[0]];
        let s1 = partition.subdomain_of[fc[1]];
        if s0 == s1 {
            continue;
        }
        let pair = (s0.min(s1), s0.max(s1));
        for &v in &mesh.faces[f].vertex_loop {
            if let Some(NodeClass::Face(c)) = classification.class_of[v] {
                if classification.faces[c].pair == pair && lists[c].last() != Some(&f) {
                    lists[c].push(f);
                }
            }
        }
    }
    for l in &mut lists {
        l.dedup();
    }
    lists
}

/// Factorized face system with its Dirichlet couplings.
pub struct FaceSystem {
    /// Unknowns: the component's nodes, ascending (mesh vertex ids).
    unknowns: Vec<usize>,
    factor: SpdFactor,
    /// `(local row, mesh vertex, coefficient)` entries of the
    /// unknown-to-Dirichlet coupling block.
    couplings: Vec<(usize, usize, f64)>,
}

impl FaceSystem {
    /// Assemble and factorize the system of one face component from its fine
    /// interface faces.
    pub fn build(
        mesh: &PolyMesh3D,
        classification: &InterfaceClassification,
        component: usize,
        fine_faces: &[usize],
        face_projectors: &[FaceProjector],
    ) -> Result<Self, CoarseError> {
        let comp = &classification.faces[component];
        let unknowns = comp.nodes.clone();
        let mut local_of = vec![usize::MAX; mesh.vertices.len()];
        for (li, &v) in unknowns.iter().enumerate() {
            local_of[v] = li;
        }

        let mut triplets: Vec<(usize, usize, f64)> = Vec::new();
        let mut couplings: Vec<(usize, usize, f64)> = Vec::new();
        for &f in fine_faces {
            let loop_ = &mesh.faces[f].vertex_loop;
            let k = &face_projectors[f].stiffness;
            for (li, &vi) in loop_.iter().enumerate() {
                for (lj, &vj) in loop_.iter().enumerate().take(li + 1) {
                    let kij = k[(li, lj)];
                    if kij == 0.0 {
                        continue;
                    }
                    match (local_of[vi], local_of[vj]) {
                        (usize::MAX, usize::MAX) => {}
                        (usize::MAX, row) => couplings.push((row, vi, kij)),
                        (row, usize::MAX) => couplings.push((row, vj, kij)),
                        (ri, rj) => triplets.push((ri, rj, kij)),
                    }
                }
            }
        }

        let a = SparseSymmetric::from_triplets(unknowns.len(), &triplets);
        let factor = factorize_spd(&a).map_err(|e| match e {
            SolverError::NotPositiveDefinite { .. } => {
                CoarseError::SingularFaceSystem { component }
            }
            other => CoarseError::Solver(other),
        })?;
        Ok(Self { unknowns, factor, couplings })
    }

    /// True when any coupled Dirichlet node carries a nonzero value.
    pub fn has_nonzero_data(&self, values: &[f64]) -> bool {
        self.couplings.iter().any(|&(_, v, _)| values[v] != 0.0)
    }

    /// Solve for the interior values given per-vertex Dirichlet data.
    pub fn solve(&self, values: &[f64]) -> Result<Vec<f64>, CoarseError> {
        let mut rhs = vec![0.0; self.unknowns.len()];
        for &(row, v, k) in &self.couplings {
            rhs[row] -= k * values[v];
        }
        Ok(self.factor.solve(&rhs))
    }

    pub fn unknowns(&self) -> &[usize] {
        &self.unknowns
    }
}
