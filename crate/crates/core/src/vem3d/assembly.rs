//! Global assembly with symmetric Dirichlet elimination.

use super::projectors::{build_all_face_projectors, build_element_projector, build_local_stiffness};
use super::{FreeDofMap, RhoField, VemError};
use crate::mesh::PolyMesh3D;
use crate::schwarz::SparseSymmetric;
use crate::Point3;

/// Assembled linear system over the free (interior) vertex dofs.
#[derive(Debug, Clone)]
pub struct GlobalSystem {
    pub a: SparseSymmetric,
    pub b: Vec<f64>,
    pub dofs: FreeDofMap,
    /// Dirichlet datum per vertex; zero everywhere unless assembled with
    /// boundary data.
    pub dirichlet_values: Vec<f64>,
}

impl GlobalSystem {
    pub fn n_free(&self) -> usize {
        self.dofs.n_free()
    }

    /// Expand a free-dof vector to a per-vertex vector, filling in the
    /// Dirichlet values on the boundary.
    pub fn full_solution(&self, free_values: &[f64]) -> Vec<f64> {
        let mut out = self.dirichlet_values.clone();
        for (fi, &v) in self.dofs.vertex_of_free.iter().enumerate() {
            out[v] = free_values[fi];
        }
        out
    }
}

/// Assemble with homogeneous Dirichlet data.
pub fn assemble(
    mesh: &PolyMesh3D,
    rho: &RhoField,
    source: &dyn Fn(&Point3) -> f64,
) -> Result<GlobalSystem, VemError> {
    assemble_impl(mesh, rho, source, None)
}

/// Assemble with boundary data `g`; the load vector absorbs the lifting
/// `b_f -= A_fb g_b` so the system stays SPD over the free dofs.
pub fn assemble_dirichlet(
    mesh: &PolyMesh3D,
    rho: &RhoField,
    source: &dyn Fn(&Point3) -> f64,
    boundary: &dyn Fn(&Point3) -> f64,
) -> Result<GlobalSystem, VemError> {
    assemble_impl(mesh, rho, source, Some(boundary))
}

fn assemble_impl(
    mesh: &PolyMesh3D,
    rho: &RhoField,
    source: &dyn Fn(&Point3) -> f64,
    boundary: Option<&dyn Fn(&Point3) -> f64>,
) -> Result<GlobalSystem, VemError> {
    let dofs = FreeDofMap::from_mesh(mesh);
    let n_free = dofs.n_free();
    let face_projectors = build_all_face_projectors(mesh)?;

    let mut dirichlet_values = vec![0.0; mesh.vertices.len()];
    if let Some(g) = boundary {
        for (v, &bdy) in mesh.boundary_vertex.iter().enumerate() {
            if bdy {
                dirichlet_values[v] = g(&mesh.vertices[v]);
            }
        }
    }

    let mut triplets: Vec<(usize, usize, f64)> = Vec::new();
    let mut b = vec![0.0; n_free];

    for c in 0..mesh.cells.len() {
        let proj = build_element_projector(c, mesh, &face_projectors);
        let k = build_local_stiffness(mesh.cells[c].diameter, &proj, rho.of_cell(c));
        let verts = &proj.vertices;
        let m = verts.len();

        // Load: P0-type rule f(x_E) |E| / n_E per vertex.
        let load = source(&mesh.cells[c].centroid) * mesh.cells[c].volume / m as f64;
        for &v in verts {
            if let Some(fi) = dofs.free_of_vertex[v] {
                b[fi] += load;
            }
        }

        for li in 0..m {
            let gi = verts[li];
            for lj in 0..=li {
                let gj = verts[lj];
                let kij = k[(li, lj)];
                if kij == 0.0 {
                    continue;
                }
                match (dofs.free_of_vertex[gi], dofs.free_of_vertex[gj]) {
                    (Some(fi), Some(fj)) => triplets.push((fi, fj, kij)),
                    (Some(fi), None) => b[fi] -= kij * dirichlet_values[gj],
                    (None, Some(fj)) => b[fj] -= kij * dirichlet_values[gi],
                    (None, None) => {}
                }
            }
        }
    }

    let a = SparseSymmetric::from_triplets(n_free, &triplets);
    if !a.is_connected() {
        return Err(VemError::DisconnectedMesh);
    }
    Ok(GlobalSystem { a, b, dofs, dirichlet_values })
}
