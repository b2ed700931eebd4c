//! Subdomain decompositions: element partitions, overlap growth and the
//! classification of interface nodes into subdomain faces, edges and vertices.

mod interface;
mod overlap;
mod partition;

pub use interface::{classify_interface, EdgeComponent, FaceComponent, InterfaceClassification, NodeClass};
pub use overlap::{grow_overlap, OverlapSets};
pub use partition::{export_partition, import_partition, partition_graph, partition_structured, structured_box_index};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DecompError {
    #[error("subdomain {subdomain} received no cells")]
    EmptySubdomain { subdomain: usize },
    #[error("interface classification failed: {0}")]
    Classification(String),
    #[error("partition file schema error: {0}")]
    Schema(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Assignment of every cell to one subdomain.
#[derive(Debug, Clone)]
pub struct Partition {
    /// Cell index -> subdomain id in `0..count`.
    pub subdomain_of: Vec<usize>,
    pub count: usize,
    /// Subdomain diameter proxy `H`.
    pub nominal_h: f64,
}

impl Partition {
    /// Cells of each subdomain, ascending.
    pub fn cells_by_subdomain(&self) -> Vec<Vec<usize>> {
        let mut sets = vec![Vec::new(); self.count];
        for (c, &s) in self.subdomain_of.iter().enumerate() {
            sets[s].push(c);
        }
        sets
    }

    /// Validate that every subdomain is nonempty.
    pub fn check_nonempty(&self) -> Result<(), DecompError> {
        let mut seen = vec![false; self.count];
        for &s in &self.subdomain_of {
            seen[s] = true;
        }
        if let Some(i) = seen.iter().position(|&b| !b) {
            return Err(DecompError::EmptySubdomain { subdomain: i });
        }
        Ok(())
    }
}
