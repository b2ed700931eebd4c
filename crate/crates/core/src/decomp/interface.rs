//! Classification of interface nodes into subdomain faces, edges and vertices.
//!
//! For a free node `x`, `sigma(x)` is the set of subdomains whose closure
//! contains `x` (computed from cell incidence). Nodes with `|sigma| = 2` form
//! subdomain faces, one per connected component of equal-sigma nodes. Nodes
//! with `|sigma| >= 3` form candidate subdomain edges; the nodes where edges
//! terminate against larger or different sigma sets become subdomain
//! vertices. The classes partition the interface.

use std::collections::HashMap;

use log::warn;

use super::{DecompError, Partition};
use crate::mesh::PolyMesh3D;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeClass {
    Face(usize),
    Edge(usize),
    Vertex(usize),
}

/// Connected patch of nodes shared by exactly two subdomains.
#[derive(Debug, Clone)]
pub struct FaceComponent {
    pub pair: (usize, usize),
    /// Interface nodes of the patch, ascending.
    pub nodes: Vec<usize>,
    /// True when the closure of the patch touches the domain boundary.
    pub touches_boundary: bool,
}

/// Connected run of nodes shared by three or more subdomains.
#[derive(Debug, Clone)]
pub struct EdgeComponent {
    pub sigma: Vec<usize>,
    pub nodes: Vec<usize>,
    /// Subdomain vertices terminating this edge (0, 1 or 2 normally).
    pub endpoints: Vec<usize>,
    pub touches_boundary: bool,
}

#[derive(Debug, Clone)]
pub struct InterfaceClassification {
    pub faces: Vec<FaceComponent>,
    pub edges: Vec<EdgeComponent>,
    /// Subdomain vertices (mesh vertex ids, ascending).
    pub vertices: Vec<usize>,
    /// Class per mesh vertex; `None` off the interface.
    pub class_of: Vec<Option<NodeClass>>,
    /// sigma per mesh vertex (empty off the interface or on the boundary).
    pub sigma: Vec<Vec<usize>>,
}

pub fn classify_interface(
    mesh: &PolyMesh3D,
    partition: &Partition,
) -> Result<InterfaceClassification, DecompError> {
    let n_verts = mesh.vertices.len();
    let vertex_cells = mesh.vertex_cells();
    let adjacency = mesh.vertex_adjacency();

    // sigma(x) from cell incidence, free nodes only.
    let mut sigma: Vec<Vec<usize>> = vec![Vec::new(); n_verts];
    for v in 0..n_verts {
        if mesh.boundary_vertex[v] {
            continue;
        }
        let mut s: Vec<usize> = vertex_cells[v].iter().map(|&c| partition.subdomain_of[c]).collect();
        s.sort_unstable();
        s.dedup();
        sigma[v] = s;
    }
    let on_interface = |v: usize| sigma[v].len() >= 2;

    // ---- subdomain faces: |sigma| = 2 ----
    let mut faces = Vec::new();
    {
        let mut visited = vec![false; n_verts];
        for v0 in 0..n_verts {
            if visited[v0] || sigma[v0].len() != 2 {
                continue;
            }
            let mut nodes = Vec::new();
            let mut stack = vec![v0];
            visited[v0] = true;
            while let Some(v) = stack.pop() {
                nodes.push(v);
                for &w in &adjacency[v] {
                    if !visited[w] && sigma[w] == sigma[v] {
                        visited[w] = true;
                        stack.push(w);
                    }
                }
            }
            nodes.sort_unstable();
            let touches_boundary = nodes
                .iter()
                .any(|&v| adjacency[v].iter().any(|&w| mesh.boundary_vertex[w]));
            faces.push(FaceComponent {
                pair: (sigma[v0][0], sigma[v0][1]),
                nodes,
                touches_boundary,
            });
        }
    }

    // ---- candidate edges: |sigma| >= 3, grouped by the exact sigma set ----
    let mut candidates: Vec<(Vec<usize> /* sigma */, Vec<usize> /* nodes */)> = Vec::new();
    {
        let mut visited = vec![false; n_verts];
        for v0 in 0..n_verts {
            if visited[v0] || sigma[v0].len() < 3 {
                continue;
            }
            let mut nodes = Vec::new();
            let mut stack = vec![v0];
            visited[v0] = true;
            while let Some(v) = stack.pop() {
                nodes.push(v);
                for &w in &adjacency[v] {
                    if !visited[w] && sigma[w] == sigma[v] {
                        visited[w] = true;
                        stack.push(w);
                    }
                }
            }
            nodes.sort_unstable();
            candidates.push((sigma[v0].clone(), nodes));
        }
    }
    // Deterministic component order regardless of discovery order.
    candidates.sort_by_key(|(_, nodes)| nodes[0]);

    // Terminal nodes per candidate: adjacent to a strictly larger sigma, to a
    // different sigma of equal size, or to the domain boundary.
    let mut is_vertex = vec![false; n_verts];
    let candidate_of: HashMap<usize, usize> = candidates
        .iter()
        .enumerate()
        .flat_map(|(i, (_, nodes))| nodes.iter().map(move |&v| (v, i)))
        .collect();

    let terminal_reasons = |v: usize| -> (bool, Vec<usize>, Vec<usize>) {
        // (touches boundary, larger-sigma neighbors, equal-size different-sigma neighbors)
        let mut boundary = false;
        let mut larger = Vec::new();
        let mut equal = Vec::new();
        for &w in &adjacency[v] {
            if mesh.boundary_vertex[w] {
                boundary = true;
            } else if sigma[w].len() > sigma[v].len() {
                larger.push(w);
            } else if sigma[w].len() == sigma[v].len() && sigma[w] != sigma[v] {
                equal.push(w);
            }
        }
        (boundary, larger, equal)
    };

    // Single nodes with |sigma| >= 4 are subdomain vertices, unless they sit
    // next to a strictly larger sigma (then they are one-node edge runs
    // terminating at that cross point).
    for (s, nodes) in &candidates {
        if nodes.len() == 1 && s.len() >= 4 {
            let v = nodes[0];
            let has_larger = adjacency[v].iter().any(|&w| sigma[w].len() > s.len());
            if !has_larger {
                is_vertex[v] = true;
            }
        }
    }

    // Components at which three or more other edge components terminate are
    // junction clusters; all their nodes become vertices.
    {
        let mut terminating: Vec<std::collections::BTreeSet<usize>> =
            vec![Default::default(); candidates.len()];
        for (ci, (_, nodes)) in candidates.iter().enumerate() {
            for &v in nodes {
                let (_, larger, equal) = terminal_reasons(v);
                for &w in larger.iter().chain(&equal) {
                    if let Some(&cj) = candidate_of.get(&w) {
                        if cj != ci {
                            terminating[cj].insert(ci);
                        }
                    }
                }
            }
        }
        for (ci, (_, nodes)) in candidates.iter().enumerate() {
            if nodes.iter().any(|&v| is_vertex[v]) {
                continue;
            }
            if terminating[ci].len() >= 3 {
                for &v in nodes {
                    is_vertex[v] = true;
                }
            }
        }
    }

    // Resolve endpoints without an adjacent vertex or boundary termination:
    // promote the larger-sigma neighbor, or the smaller node id of an
    // equal-sigma junction.
    for (_, nodes) in &candidates {
        for &v in nodes {
            if is_vertex[v] {
                continue;
            }
            let (boundary, larger, equal) = terminal_reasons(v);
            if !boundary && larger.is_empty() && equal.is_empty() {
                continue; // interior edge node
            }
            let has_vertex_neighbor = adjacency[v].iter().any(|&w| is_vertex[w]);
            if has_vertex_neighbor || boundary {
                continue;
            }
            if let Some(&w) = larger.first() {
                is_vertex[w] = true;
            } else if let Some(&w) = equal.first() {
                is_vertex[v.min(w)] = true;
            }
        }
    }

    // Final edge components: recompute over non-vertex nodes so promoted
    // nodes no longer split or join runs.
    let mut edges: Vec<EdgeComponent> = Vec::new();
    let mut edge_of = vec![usize::MAX; n_verts];
    {
        let mut visited = vec![false; n_verts];
        let mut seeds: Vec<usize> = candidates.iter().flat_map(|(_, ns)| ns.iter().copied()).collect();
        seeds.sort_unstable();
        for v0 in seeds {
            if visited[v0] || is_vertex[v0] {
                continue;
            }
            let mut nodes = Vec::new();
            let mut stack = vec![v0];
            visited[v0] = true;
            while let Some(v) = stack.pop() {
                nodes.push(v);
                for &w in &adjacency[v] {
                    if !visited[w] && !is_vertex[w] && sigma[w] == sigma[v] {
                        visited[w] = true;
                        stack.push(w);
                    }
                }
            }
            nodes.sort_unstable();
            let mut endpoints: Vec<usize> = nodes
                .iter()
                .flat_map(|&v| adjacency[v].iter().copied())
                .filter(|&w| is_vertex[w])
                .collect();
            endpoints.sort_unstable();
            endpoints.dedup();
            let touches_boundary = nodes
                .iter()
                .any(|&v| adjacency[v].iter().any(|&w| mesh.boundary_vertex[w]));
            if endpoints.len() > 2 {
                // Junction clusters on irregular partitions can leave an edge
                // adjacent to several vertices; keep the two farthest apart
                // as the chord endpoints (ties by smallest ids).
                warn!(
                    "subdomain edge starting at node {} is adjacent to {} vertices; keeping the extremal pair",
                    nodes[0],
                    endpoints.len()
                );
                let mut best = (f64::MIN, (endpoints[0], endpoints[1]));
                for (a_pos, &a) in endpoints.iter().enumerate() {
                    for &b in &endpoints[a_pos + 1..] {
                        let d = (mesh.vertices[a] - mesh.vertices[b]).norm();
                        if d > best.0 {
                            best = (d, (a, b));
                        }
                    }
                }
                endpoints = vec![best.1 .0, best.1 .1];
            }
            let id = edges.len();
            for &v in &nodes {
                edge_of[v] = id;
            }
            edges.push(EdgeComponent { sigma: sigma[v0].clone(), nodes, endpoints, touches_boundary });
        }
    }

    let vertices: Vec<usize> = (0..n_verts).filter(|&v| is_vertex[v]).collect();

    // Total classification check.
    let mut class_of: Vec<Option<NodeClass>> = vec![None; n_verts];
    for (i, f) in faces.iter().enumerate() {
        for &v in &f.nodes {
            class_of[v] = Some(NodeClass::Face(i));
        }
    }
    for (i, e) in edges.iter().enumerate() {
        for &v in &e.nodes {
            class_of[v] = Some(NodeClass::Edge(i));
        }
    }
    for (i, &v) in vertices.iter().enumerate() {
        class_of[v] = Some(NodeClass::Vertex(i));
    }
    for v in 0..n_verts {
        if on_interface(v) && class_of[v].is_none() {
            return Err(DecompError::Classification(format!(
                "interface node {v} (sigma size {}) left unclassified",
                sigma[v].len()
            )));
        }
    }

    Ok(InterfaceClassification { faces, edges, vertices, class_of, sigma })
}

impl InterfaceClassification {
    /// All interface nodes, ascending.
    pub fn interface_nodes(&self) -> Vec<usize> {
        (0..self.class_of.len()).filter(|&v| self.class_of[v].is_some()).collect()
    }
}
