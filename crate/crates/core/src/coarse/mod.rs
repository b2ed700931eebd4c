//! Vertex-based coarse space.
//!
//! One coarse function per subdomain vertex: the Kronecker delta at subdomain
//! vertices, a linear chord rule along subdomain edges, discrete face-Laplace
//! solves on subdomain faces (2D virtual elements on the fine interface
//! faces) and discrete harmonic extension into the subdomain interiors. The
//! columns assemble the extension operator `R0^T` and form a partition of
//! unity on the interface away from the domain boundary.

mod face_laplace;

pub use face_laplace::FaceSystem;

use std::collections::HashMap;

use thiserror::Error;

use crate::decomp::{EdgeComponent, InterfaceClassification, Partition};
use crate::mesh::PolyMesh3D;
use crate::schwarz::{factorize_spd, SolverError, SpdFactor};
use crate::vem3d::{FaceProjector, GlobalSystem};
use crate::Point3;

#[derive(Debug, Error)]
pub enum CoarseError {
    #[error("degenerate subdomain edge: endpoints coincide (|x1 - x0| = {length:.3e})")]
    DegenerateEdge { length: f64 },
    #[error("face component {component} has interior nodes disconnected from its boundary data")]
    SingularFaceSystem { component: usize },
    #[error(transparent)]
    Solver(#[from] SolverError),
}

/// Columns of the extension operator `R0^T`, one per subdomain vertex.
#[derive(Debug, Clone)]
pub struct CoarseBasis {
    /// Mesh vertex ids of the coarse vertices, ascending.
    vertices: Vec<usize>,
    /// Sparse columns over free dofs, sorted by dof index.
    columns: Vec<Vec<(usize, f64)>>,
}

impl CoarseBasis {
    pub fn empty() -> Self {
        Self { vertices: Vec::new(), columns: Vec::new() }
    }

    pub fn from_columns(vertices: Vec<usize>, columns: Vec<Vec<(usize, f64)>>) -> Self {
        assert_eq!(vertices.len(), columns.len());
        Self { vertices, columns }
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    /// Coarse-space dimension `|V_0|`.
    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn columns(&self) -> &[Vec<(usize, f64)>] {
        &self.columns
    }
}

/// Values of the coarse function of `vertex` on the nodes of a subdomain
/// edge, by chord projection onto the segment between the two endpoints:
/// `t = (x - x0).(x1 - x0) / |x1 - x0|^2`, value `clamp(1 - t, 0, 1)`.
pub fn edge_coarse_values(
    positions: &[Point3],
    edge: &EdgeComponent,
    vertex: usize,
) -> Result<Vec<f64>, CoarseError> {
    assert_eq!(edge.endpoints.len(), 2, "chord rule needs exactly two endpoints");
    assert!(edge.endpoints.contains(&vertex));
    let x0 = positions[vertex];
    let other = if edge.endpoints[0] == vertex { edge.endpoints[1] } else { edge.endpoints[0] };
    let x1 = positions[other];
    let chord = x1 - x0;
    let len2 = chord.norm_squared();
    if len2.sqrt() < 1e-14 {
        return Err(CoarseError::DegenerateEdge { length: len2.sqrt() });
    }
    Ok(edge
        .nodes
        .iter()
        .map(|&n| {
            let t = (positions[n] - x0).dot(&chord) / len2;
            (1.0 - t).clamp(0.0, 1.0)
        })
        .collect())
}

/// Discrete harmonic extension blocks of the non-overlapping subdomains.
struct InteriorBlock {
    /// Free dofs strictly inside the subdomain, ascending.
    dofs: Vec<usize>,
    factor: Option<SpdFactor>,
}

/// Build all coarse basis columns.
///
/// Face-system and interior-block factorizations are created on first use and
/// cached across columns.
pub fn build_coarse_basis(
    mesh: &PolyMesh3D,
    system: &GlobalSystem,
    classification: &InterfaceClassification,
    partition: &Partition,
    face_projectors: &[FaceProjector],
) -> Result<CoarseBasis, CoarseError> {
    if classification.vertices.is_empty() {
        return Ok(CoarseBasis::empty());
    }
    let n_verts = mesh.vertices.len();

    // Interior dofs per subdomain: free nodes whose sigma is the singleton.
    let mut interior_blocks: Vec<InteriorBlock> = {
        let mut dofs_by_sub = vec![Vec::new(); partition.count];
        for v in 0..n_verts {
            if classification.sigma[v].len() == 1 {
                if let Some(fi) = system.dofs.free_of_vertex[v] {
                    dofs_by_sub[classification.sigma[v][0]].push(fi);
                }
            }
        }
        dofs_by_sub.into_iter().map(|dofs| InteriorBlock { dofs, factor: None }).collect()
    };

    let fine_faces = face_laplace::fine_faces_by_component(mesh, partition, classification);
    let mut face_systems: Vec<Option<FaceSystem>> = (0..classification.faces.len()).map(|_| None).collect();

    let mut columns = Vec::with_capacity(classification.vertices.len());
    let mut values = vec![0.0f64; n_verts];
    let mut touched: Vec<usize> = Vec::new();

    for &cv in &classification.vertices {
        debug_assert!(touched.is_empty());
        values[cv] = 1.0;
        touched.push(cv);

        // Edges incident to the coarse vertex.
        for edge in &classification.edges {
            if !edge.endpoints.contains(&cv) {
                continue;
            }
            match edge.endpoints.len() {
                1 => {
                    // The chord target is missing (edge runs to the domain
                    // boundary); the coarse function stays 1 along the edge.
                    for &n in &edge.nodes {
                        values[n] = 1.0;
                        touched.push(n);
                    }
                }
                2 => {
                    let vals = edge_coarse_values(&mesh.vertices, edge, cv)?;
                    for (&n, &val) in edge.nodes.iter().zip(&vals) {
                        values[n] = val;
                        touched.push(n);
                    }
                }
                count => unreachable!("edge carries {count} endpoints; classification caps at 2"),
            }
        }

        // Face solves wherever the boundary data is nonzero.
        for (fi, component) in classification.faces.iter().enumerate() {
            if face_systems[fi].is_none() {
                face_systems[fi] = Some(FaceSystem::build(
                    mesh,
                    classification,
                    fi,
                    &fine_faces[fi],
                    face_projectors,
                )?);
            }
            let fs = face_systems[fi].as_ref().unwrap();
            if !fs.has_nonzero_data(&values) {
                continue;
            }
            let sol = fs.solve(&values)?;
            for (&n, &val) in component.nodes.iter().zip(&sol) {
                values[n] = val;
                touched.push(n);
            }
        }

        // Harmonic extension into every subdomain whose boundary carries
        // nonzero values.
        let mut active_subdomains: Vec<usize> = touched
            .iter()
            .filter(|&&n| values[n] != 0.0)
            .flat_map(|&n| classification.sigma[n].iter().copied())
            .collect();
        active_subdomains.sort_unstable();
        active_subdomains.dedup();
        for s in active_subdomains {
            let block = &mut interior_blocks[s];
            if block.dofs.is_empty() {
                continue;
            }
            if block.factor.is_none() {
                block.factor = Some(factorize_spd(&system.a.submatrix(&block.dofs))?);
            }
            let interior_values =
                harmonic_extension_values(system, &block.dofs, block.factor.as_ref().unwrap(), &values);
            for (&fi, &val) in block.dofs.iter().zip(&interior_values) {
                let v = system.dofs.vertex_of_free[fi];
                values[v] = val;
                touched.push(v);
            }
        }

        // Freeze the column.
        let mut column: Vec<(usize, f64)> = touched
            .iter()
            .filter_map(|&v| {
                let val = values[v];
                system.dofs.free_of_vertex[v].and_then(|fi| (val != 0.0).then_some((fi, val)))
            })
            .collect();
        column.sort_unstable_by_key(|&(fi, _)| fi);
        column.dedup_by_key(|&mut (fi, _)| fi);
        columns.push(column);

        for &v in &touched {
            values[v] = 0.0;
        }
        touched.clear();
    }

    Ok(CoarseBasis { vertices: classification.vertices.clone(), columns })
}

/// Solve `A_II u_I = -A_IG u_G` for one subdomain.
fn harmonic_extension_values(
    system: &GlobalSystem,
    interior: &[usize],
    factor: &SpdFactor,
    values: &[f64],
) -> Vec<f64> {
    let n_free = system.n_free();
    let mut in_rows = vec![false; n_free];
    let mut row_local = vec![0usize; n_free];
    for (li, &fi) in interior.iter().enumerate() {
        in_rows[fi] = true;
        row_local[fi] = li;
    }
    let mut rhs = vec![0.0; interior.len()];
    system.a.accumulate_coupling(
        &in_rows,
        &row_local,
        |j| {
            if in_rows[j] {
                return None;
            }
            let v = system.dofs.vertex_of_free[j];
            (values[v] != 0.0).then_some(values[v])
        },
        &mut rhs,
    );
    for r in rhs.iter_mut() {
        *r = -*r;
    }
    factor.solve(&rhs)
}

/// Expose the harmonic extension for direct use and testing: given values on
/// the free dofs outside `interior`, returns the energy-minimal interior
/// values.
pub fn harmonic_interior_extension(
    system: &GlobalSystem,
    interior: &[usize],
    boundary_values: &HashMap<usize, f64>,
) -> Result<Vec<f64>, CoarseError> {
    if interior.is_empty() {
        return Ok(Vec::new());
    }
    let factor = factorize_spd(&system.a.submatrix(interior))?;
    let mut values = vec![0.0; system.dofs.free_of_vertex.len()];
    for (&fi, &val) in boundary_values {
        values[system.dofs.vertex_of_free[fi]] = val;
    }
    Ok(harmonic_extension_values(system, interior, &factor, &values))
}

#[cfg(test)]
mod tests;
