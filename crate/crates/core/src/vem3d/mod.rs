//! Lowest-order 3D virtual element discretization: face and element
//! projectors, stabilized local stiffness matrices and global assembly with
//! Dirichlet elimination.

mod assembly;
mod projectors;

pub use assembly::{assemble, assemble_dirichlet, GlobalSystem};
pub use projectors::{
    build_all_face_projectors, build_element_projector, build_face_projector,
    build_local_stiffness, ElementProjector, FaceFrame, FaceProjector,
};

use thiserror::Error;

use crate::mesh::PolyMesh3D;

#[derive(Debug, Error)]
pub enum VemError {
    #[error("face {face}: projector system is singular")]
    SingularFace { face: usize },
    #[error("the free-dof graph is disconnected; the mesh does not carry a single coupled system")]
    DisconnectedMesh,
}

/// Map between mesh vertices and free dofs.
///
/// Free dofs are the interior vertices in ascending vertex order. Every module
/// relies on this single numbering.
#[derive(Debug, Clone)]
pub struct FreeDofMap {
    pub free_of_vertex: Vec<Option<usize>>,
    pub vertex_of_free: Vec<usize>,
}

impl FreeDofMap {
    pub fn from_mesh(mesh: &PolyMesh3D) -> Self {
        let mut free_of_vertex = vec![None; mesh.vertices.len()];
        let mut vertex_of_free = Vec::new();
        for (v, &bdy) in mesh.boundary_vertex.iter().enumerate() {
            if !bdy {
                free_of_vertex[v] = Some(vertex_of_free.len());
                vertex_of_free.push(v);
            }
        }
        Self { free_of_vertex, vertex_of_free }
    }

    pub fn n_free(&self) -> usize {
        self.vertex_of_free.len()
    }
}

/// Diffusion coefficient, constant per element.
pub enum RhoField<'a> {
    Constant(f64),
    PerSubdomain { partition: &'a crate::decomp::Partition, values: &'a [f64] },
}

impl RhoField<'_> {
    pub fn of_cell(&self, cell: usize) -> f64 {
        match self {
            RhoField::Constant(r) => *r,
            RhoField::PerSubdomain { partition, values } => values[partition.subdomain_of[cell]],
        }
    }
}
