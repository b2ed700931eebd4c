//! Overlapping subdomains by layered dilation.

use super::Partition;
use crate::mesh::PolyMesh3D;
use crate::vem3d::FreeDofMap;

/// Overlapping subdomains and the interior dofs of each local space.
#[derive(Debug, Clone)]
pub struct OverlapSets {
    /// Cells of each overlapping subdomain, ascending.
    pub cells: Vec<Vec<usize>>,
    /// Free dofs strictly inside each overlapping subdomain, ascending.
    interior_dofs: Vec<Vec<usize>>,
    pub layers: usize,
    /// Overlap width proxy: `layers` times the mean cell diameter.
    pub nominal_delta: f64,
}

impl OverlapSets {
    pub fn subdomain_count(&self) -> usize {
        self.interior_dofs.len()
    }

    pub fn interior_dofs(&self, i: usize) -> &[usize] {
        &self.interior_dofs[i]
    }

    /// Build directly from interior dof sets (tests and one-level setups).
    pub fn from_raw(interior_dofs: Vec<Vec<usize>>, layers: usize, nominal_delta: f64) -> Self {
        Self { cells: vec![Vec::new(); interior_dofs.len()], interior_dofs, layers, nominal_delta }
    }
}

/// Grow every subdomain by `layers` rounds of vertex-neighbor dilation, then
/// collect the free dofs whose incident cells all lie inside the grown set.
///
/// Dilation is by shared vertices, so one layer around a box subdomain adds a
/// full shell of cells including the diagonal ones and the overlap width is
/// `layers` cells in every direction.
pub fn grow_overlap(mesh: &PolyMesh3D, partition: &Partition, layers: usize) -> OverlapSets {
    assert!(layers >= 1);
    let vertex_cells = mesh.vertex_cells();
    let n_cells = mesh.cells.len();
    let dofs = FreeDofMap::from_mesh(mesh);

    let mut cells_out = Vec::with_capacity(partition.count);
    let mut interior_out = Vec::with_capacity(partition.count);

    for sets in partition.cells_by_subdomain() {
        let mut in_set = vec![false; n_cells];
        for &c in &sets {
            in_set[c] = true;
        }
        let mut frontier = sets.clone();
        for _ in 0..layers {
            let mut next = Vec::new();
            for &c in &frontier {
                for &v in &mesh.cell_vertices(c) {
                    for &d in &vertex_cells[v] {
                        if !in_set[d] {
                            in_set[d] = true;
                            next.push(d);
                        }
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            frontier = next;
        }
        let grown: Vec<usize> = (0..n_cells).filter(|&c| in_set[c]).collect();

        let mut interior = Vec::new();
        for (v, free) in dofs.free_of_vertex.iter().enumerate() {
            if let Some(fi) = free {
                if vertex_cells[v].iter().all(|&c| in_set[c]) {
                    interior.push(*fi);
                }
            }
        }
        cells_out.push(grown);
        interior_out.push(interior);
    }

    OverlapSets {
        cells: cells_out,
        interior_dofs: interior_out,
        layers,
        nominal_delta: layers as f64 * mesh.mean_cell_diameter(),
    }
}
