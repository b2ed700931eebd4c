//! Polyhedral mesh data model, generators and IO.
//!
//! A mesh stores vertices, planar polygonal faces and polyhedral cells. Cells
//! reference faces together with an orientation sign (+1 when the stored face
//! normal points out of the cell). Interior faces are shared by exactly two
//! cells with opposite signs; boundary faces by one. Meshes are immutable
//! after construction.

mod builder;
mod generators;
mod geometry;
mod io;
mod voronoi;

pub use builder::MeshBuilder;
pub use generators::{generate_cubic_mesh, generate_hexprism_mesh};
pub use geometry::compute_geometry;
pub use io::{export_mesh, import_mesh};
pub use voronoi::generate_voronoi_mesh;

use crate::{Point3, Vector3};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("face {face} is not planar: deviation {deviation:.3e} exceeds tolerance {tolerance:.3e}")]
    NonPlanarFace { face: usize, deviation: f64, tolerance: f64 },
    #[error("cell {cell} has non-positive volume {volume:.3e}; face orientations are inconsistent")]
    NegativeVolume { cell: usize, volume: f64 },
    #[error("degenerate Voronoi cell {cell}: {reason}")]
    DegenerateCell { cell: usize, reason: String },
    #[error("mesh file schema error: {0}")]
    Schema(String),
    #[error("mesh topology error: {0}")]
    Topology(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Planar polygonal face.
#[derive(Debug, Clone)]
pub struct PolyFace {
    /// Ordered vertex indices; the loop winds counter-clockwise when viewed
    /// from the side the normal points to.
    pub vertex_loop: Vec<usize>,
    /// Unit normal of the supporting plane.
    pub normal: Vector3,
    /// Plane offset: `normal . x = offset` on the face.
    pub offset: f64,
    pub area: f64,
    pub centroid: Point3,
    /// Face diameter `h_f` (largest vertex distance).
    pub diameter: f64,
}

/// Polyhedral cell as an oriented list of faces.
#[derive(Debug, Clone)]
pub struct PolyCell {
    /// `(face index, sign)`; sign +1 when the face normal points outward.
    pub face_refs: Vec<(usize, i8)>,
    pub volume: f64,
    pub centroid: Point3,
    /// Cell diameter `h_E`.
    pub diameter: f64,
}

/// Conforming polyhedral mesh.
#[derive(Debug, Clone)]
pub struct PolyMesh3D {
    pub vertices: Vec<Point3>,
    pub faces: Vec<PolyFace>,
    pub cells: Vec<PolyCell>,
    /// Unique mesh edges as sorted vertex pairs, lexicographically ordered.
    pub edges: Vec<(usize, usize)>,
    /// True for vertices lying on the domain boundary.
    pub boundary_vertex: Vec<bool>,
}

impl PolyMesh3D {
    /// Assemble a mesh from raw connectivity, derive edges and boundary flags,
    /// compute geometric quantities and validate the result.
    pub fn from_connectivity(
        vertices: Vec<Point3>,
        face_loops: Vec<Vec<usize>>,
        cell_faces: Vec<Vec<(usize, i8)>>,
    ) -> Result<Self, MeshError> {
        for (i, p) in vertices.iter().enumerate() {
            if !(p.x.is_finite() && p.y.is_finite() && p.z.is_finite()) {
                return Err(MeshError::Schema(format!("vertex {i} has non-finite coordinates")));
            }
        }
        for (i, loop_) in face_loops.iter().enumerate() {
            if loop_.len() < 3 {
                return Err(MeshError::Topology(format!("face {i} has fewer than 3 vertices")));
            }
            if loop_.iter().any(|&v| v >= vertices.len()) {
                return Err(MeshError::Schema(format!("face {i} references a missing vertex")));
            }
        }
        for (c, refs) in cell_faces.iter().enumerate() {
            if refs.is_empty() {
                return Err(MeshError::Topology(format!("cell {c} has no faces")));
            }
            if refs.iter().any(|&(f, _)| f >= face_loops.len()) {
                return Err(MeshError::Schema(format!("cell {c} references a missing face")));
            }
        }

        let faces: Vec<PolyFace> = face_loops
            .into_iter()
            .map(|vertex_loop| PolyFace {
                vertex_loop,
                normal: Vector3::zeros(),
                offset: 0.0,
                area: 0.0,
                centroid: Point3::origin(),
                diameter: 0.0,
            })
            .collect();
        let cells: Vec<PolyCell> = cell_faces
            .into_iter()
            .map(|face_refs| PolyCell {
                face_refs,
                volume: 0.0,
                centroid: Point3::origin(),
                diameter: 0.0,
            })
            .collect();

        let mut mesh = PolyMesh3D {
            edges: derive_edges(&faces),
            boundary_vertex: Vec::new(),
            vertices,
            faces,
            cells,
        };
        mesh.validate_topology()?;
        mesh.derive_boundary_flags();
        geometry::compute_geometry(&mut mesh)?;
        Ok(mesh)
    }

    /// Incident cells per face: `[first, second]` with `usize::MAX` for none.
    pub fn face_cells(&self) -> Vec<[usize; 2]> {
        let mut fc = vec![[usize::MAX; 2]; self.faces.len()];
        for (c, cell) in self.cells.iter().enumerate() {
            for &(f, _) in &cell.face_refs {
                if fc[f][0] == usize::MAX {
                    fc[f][0] = c;
                } else if fc[f][1] == usize::MAX {
                    fc[f][1] = c;
                } else {
                    fc[f][1] = usize::MAX - 1; // over-shared; caught by validate
                }
            }
        }
        fc
    }

    /// Sorted unique vertex indices of a cell.
    pub fn cell_vertices(&self, c: usize) -> Vec<usize> {
        let mut vs: Vec<usize> = self.cells[c]
            .face_refs
            .iter()
            .flat_map(|&(f, _)| self.faces[f].vertex_loop.iter().copied())
            .collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }

    /// Sorted unique edges of a cell, as sorted vertex pairs.
    pub fn cell_edges(&self, c: usize) -> Vec<(usize, usize)> {
        let mut es = Vec::new();
        for &(f, _) in &self.cells[c].face_refs {
            let loop_ = &self.faces[f].vertex_loop;
            for k in 0..loop_.len() {
                let a = loop_[k];
                let b = loop_[(k + 1) % loop_.len()];
                es.push((a.min(b), a.max(b)));
            }
        }
        es.sort_unstable();
        es.dedup();
        es
    }

    /// Cells incident to each vertex.
    pub fn vertex_cells(&self) -> Vec<Vec<usize>> {
        let mut vc = vec![Vec::new(); self.vertices.len()];
        for c in 0..self.cells.len() {
            for v in self.cell_vertices(c) {
                vc[v].push(c);
            }
        }
        vc
    }

    /// Vertex adjacency lists along mesh edges.
    pub fn vertex_adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    /// Cell adjacency across shared faces.
    pub fn cell_adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.cells.len()];
        for fc in self.face_cells() {
            if fc[0] != usize::MAX && fc[1] != usize::MAX {
                adj[fc[0]].push(fc[1]);
                adj[fc[1]].push(fc[0]);
            }
        }
        for a in &mut adj {
            a.sort_unstable();
            a.dedup();
        }
        adj
    }

    fn derive_boundary_flags(&mut self) {
        let fc = self.face_cells();
        let mut flags = vec![false; self.vertices.len()];
        for (f, face) in self.faces.iter().enumerate() {
            if fc[f][1] == usize::MAX {
                for &v in &face.vertex_loop {
                    flags[v] = true;
                }
            }
        }
        self.boundary_vertex = flags;
    }

    /// Structural checks: face sharing, per-cell closedness and Euler formula.
    pub fn validate_topology(&self) -> Result<(), MeshError> {
        // Face incidence and opposite orientation across interior faces.
        let mut signs: Vec<Vec<i8>> = vec![Vec::new(); self.faces.len()];
        for cell in &self.cells {
            for &(f, s) in &cell.face_refs {
                signs[f].push(s);
            }
        }
        for (f, s) in signs.iter().enumerate() {
            match s.len() {
                1 => {}
                2 => {
                    if s[0] + s[1] != 0 {
                        return Err(MeshError::Topology(format!(
                            "interior face {f} is not oppositely oriented by its two cells"
                        )));
                    }
                }
                n => {
                    return Err(MeshError::Topology(format!("face {f} referenced by {n} cells")));
                }
            }
        }

        for c in 0..self.cells.len() {
            // Closed surface: each edge shared by exactly two of the cell's faces.
            let mut edge_count = std::collections::HashMap::new();
            for &(f, _) in &self.cells[c].face_refs {
                let loop_ = &self.faces[f].vertex_loop;
                for k in 0..loop_.len() {
                    let a = loop_[k];
                    let b = loop_[(k + 1) % loop_.len()];
                    *edge_count.entry((a.min(b), a.max(b))).or_insert(0usize) += 1;
                }
            }
            if edge_count.values().any(|&n| n != 2) {
                return Err(MeshError::Topology(format!("cell {c} is not a closed surface")));
            }
            let v = self.cell_vertices(c).len() as i64;
            let e = edge_count.len() as i64;
            let f = self.cells[c].face_refs.len() as i64;
            if v - e + f != 2 {
                return Err(MeshError::Topology(format!(
                    "cell {c} violates the Euler formula: V={v} E={e} F={f}"
                )));
            }
        }
        Ok(())
    }

    pub fn total_volume(&self) -> f64 {
        self.cells.iter().map(|c| c.volume).sum()
    }

    /// Mean cell diameter, the fine-scale proxy `h`.
    pub fn mean_cell_diameter(&self) -> f64 {
        if self.cells.is_empty() {
            return 0.0;
        }
        self.cells.iter().map(|c| c.diameter).sum::<f64>() / self.cells.len() as f64
    }
}

fn derive_edges(faces: &[PolyFace]) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for face in faces {
        let loop_ = &face.vertex_loop;
        for k in 0..loop_.len() {
            let a = loop_[k];
            let b = loop_[(k + 1) % loop_.len()];
            edges.push((a.min(b), a.max(b)));
        }
    }
    edges.sort_unstable();
    edges.dedup();
    edges
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_open_cell() {
        // Unit cube with one face missing.
        let mesh = generate_cubic_mesh(1);
        let mut cell_faces: Vec<Vec<(usize, i8)>> =
            mesh.cells.iter().map(|c| c.face_refs.clone()).collect();
        cell_faces[0].pop();
        let loops: Vec<Vec<usize>> = mesh.faces.iter().map(|f| f.vertex_loop.clone()).collect();
        let err = PolyMesh3D::from_connectivity(mesh.vertices.clone(), loops, cell_faces);
        assert!(matches!(err, Err(MeshError::Topology(_))));
    }

    #[test]
    fn rejects_nonfinite_vertex() {
        let mesh = generate_cubic_mesh(1);
        let mut vs = mesh.vertices.clone();
        vs[0].x = f64::NAN;
        let loops: Vec<Vec<usize>> = mesh.faces.iter().map(|f| f.vertex_loop.clone()).collect();
        let cells: Vec<Vec<(usize, i8)>> = mesh.cells.iter().map(|c| c.face_refs.clone()).collect();
        assert!(matches!(
            PolyMesh3D::from_connectivity(vs, loops, cells),
            Err(MeshError::Schema(_))
        ));
    }
}
