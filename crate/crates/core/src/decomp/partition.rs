//! Element partitions: structured boxes and deterministic recursive graph
//! bisection, plus JSON import/export for externally produced partitions.

use std::collections::VecDeque;
use std::fs;
use std::path::Path;

use serde::Deserialize;

use super::{DecompError, Partition};
use crate::mesh::PolyMesh3D;

/// Box index of a coordinate on the `m`-fold grid; exact ties go to the
/// lower box.
pub fn structured_box_index(x: f64, m: usize) -> usize {
    let s = x * m as f64;
    let k = if s.fract() == 0.0 { s as i64 - 1 } else { s.floor() as i64 };
    k.clamp(0, m as i64 - 1) as usize
}

/// Assign each cell to the box of the `m x m x m` grid containing its
/// centroid.
pub fn partition_structured(mesh: &PolyMesh3D, m: usize) -> Result<Partition, DecompError> {
    assert!(m >= 1);
    let subdomain_of: Vec<usize> = mesh
        .cells
        .iter()
        .map(|c| {
            let (bx, by, bz) = (
                structured_box_index(c.centroid.x, m),
                structured_box_index(c.centroid.y, m),
                structured_box_index(c.centroid.z, m),
            );
            (bz * m + by) * m + bx
        })
        .collect();
    let partition = Partition { subdomain_of, count: m * m * m, nominal_h: 1.0 / m as f64 };
    partition.check_nonempty()?;
    Ok(partition)
}

/// Recursive bisection of the cell adjacency graph. Each split seeds a BFS
/// layering from a pseudo-peripheral cell, refines the boundary with
/// size-preserving swaps that reduce the face cut, and reassigns stray
/// components so every part stays face-connected. Deterministic; the seed
/// parameter is accepted for interface stability but unused.
pub fn partition_graph(mesh: &PolyMesh3D, n_parts: usize, _rng_seed: u64) -> Result<Partition, DecompError> {
    let n_cells = mesh.cells.len();
    if n_parts == 0 || n_parts > n_cells {
        return Err(DecompError::EmptySubdomain { subdomain: n_parts.min(n_cells) });
    }
    let adj = mesh.cell_adjacency();
    let mut assignment = vec![0usize; n_cells];
    let all: Vec<usize> = (0..n_cells).collect();
    bisect(&all, &adj, n_parts, 0, &mut assignment);

    let nominal_h = (1.0f64 / n_parts as f64).cbrt();
    let partition = Partition { subdomain_of: assignment, count: n_parts, nominal_h };
    partition.check_nonempty()?;
    Ok(partition)
}

fn bisect(cells: &[usize], adj: &[Vec<usize>], n_parts: usize, first_id: usize, out: &mut [usize]) {
    if n_parts == 1 {
        for &c in cells {
            out[c] = first_id;
        }
        return;
    }
    let n1 = n_parts.div_ceil(2);
    let n2 = n_parts - n1;
    let target_left = cells.len() * n1 / n_parts;

    let member = MemberSet::new(cells, adj.len());

    // Pseudo-peripheral start: two BFS sweeps from the smallest cell id.
    let p0 = cells[0];
    let far = bfs_order(p0, adj, &member);
    let start = *far.last().unwrap();
    let order = bfs_order(start, adj, &member);

    let mut in_left = vec![false; adj.len()];
    for &c in &order[..target_left] {
        in_left[c] = true;
    }

    refine_by_swaps(cells, adj, &member, &mut in_left);
    repair_and_rebalance(cells, adj, &member, &mut in_left, target_left);

    let left: Vec<usize> = cells.iter().copied().filter(|&c| in_left[c]).collect();
    let right: Vec<usize> = cells.iter().copied().filter(|&c| !in_left[c]).collect();
    // A bisection side can end up empty only on degenerate graphs; fall back
    // to an id split so recursion always terminates with nonempty parts.
    if left.is_empty() || right.is_empty() {
        let (l, r) = cells.split_at(target_left.max(1).min(cells.len() - 1));
        bisect(l, adj, n1, first_id, out);
        bisect(r, adj, n2, first_id + n1, out);
        return;
    }
    bisect(&left, adj, n1, first_id, out);
    bisect(&right, adj, n2, first_id + n1, out);
}

struct MemberSet {
    is_member: Vec<bool>,
}

impl MemberSet {
    fn new(cells: &[usize], n: usize) -> Self {
        let mut is_member = vec![false; n];
        for &c in cells {
            is_member[c] = true;
        }
        Self { is_member }
    }
}

fn bfs_order(start: usize, adj: &[Vec<usize>], member: &MemberSet) -> Vec<usize> {
    let mut seen = vec![false; adj.len()];
    let mut order = Vec::new();
    let mut queue = VecDeque::new();
    queue.push_back(start);
    seen[start] = true;
    while let Some(c) = queue.pop_front() {
        order.push(c);
        for &d in &adj[c] {
            if member.is_member[d] && !seen[d] {
                seen[d] = true;
                queue.push_back(d);
            }
        }
    }
    // Cells unreachable from the seed (disconnected subset) go last, ascending.
    for (c, &m) in member.is_member.iter().enumerate() {
        if m && !seen[c] {
            order.push(c);
        }
    }
    order
}

/// Size-preserving pair swaps across the cut while the face cut decreases.
fn refine_by_swaps(cells: &[usize], adj: &[Vec<usize>], member: &MemberSet, in_left: &mut [bool]) {
    const MAX_PASSES: usize = 8;
    for _ in 0..MAX_PASSES {
        let gain_of = |c: usize, in_left: &[bool]| -> i64 {
            // Cut reduction when c changes side.
            let mut same = 0i64;
            let mut other = 0i64;
            for &d in &adj[c] {
                if member.is_member[d] {
                    if in_left[d] == in_left[c] {
                        same += 1;
                    } else {
                        other += 1;
                    }
                }
            }
            other - same
        };
        let mut best_left: Option<(i64, usize)> = None;
        let mut best_right: Option<(i64, usize)> = None;
        for &c in cells {
            let g = gain_of(c, in_left);
            let slot = if in_left[c] { &mut best_left } else { &mut best_right };
            if slot.is_none() || g > slot.unwrap().0 {
                *slot = Some((g, c));
            }
        }
        let (Some((gl, cl)), Some((gr, cr))) = (best_left, best_right) else {
            return;
        };
        let adjacent = adj[cl].contains(&cr) as i64;
        if gl + gr - 2 * adjacent <= 0 {
            return;
        }
        in_left[cl] = false;
        in_left[cr] = true;
    }
}

/// Reassign all but the largest connected component of each side, then move
/// boundary cells back toward the exact split size without breaking
/// connectivity.
fn repair_and_rebalance(
    cells: &[usize],
    adj: &[Vec<usize>],
    member: &MemberSet,
    in_left: &mut [bool],
    target_left: usize,
) {
    for _round in 0..6 {
        let mut changed = false;
        for side in [true, false] {
            let comps = components_of_side(cells, adj, member, in_left, side);
            if comps.len() <= 1 {
                continue;
            }
            let keep = comps
                .iter()
                .enumerate()
                .max_by_key(|(i, c)| (c.len(), usize::MAX - i))
                .unwrap()
                .0;
            for (i, comp) in comps.iter().enumerate() {
                if i != keep {
                    for &c in comp {
                        in_left[c] = !side;
                        changed = true;
                    }
                }
            }
        }
        changed |= rebalance_once(cells, adj, member, in_left, target_left);
        if !changed {
            return;
        }
    }
}

/// Move cells from the oversized side to the other, largest cut gain first,
/// skipping moves that would disconnect the donor. Returns true when any cell
/// moved.
fn rebalance_once(
    cells: &[usize],
    adj: &[Vec<usize>],
    member: &MemberSet,
    in_left: &mut [bool],
    target_left: usize,
) -> bool {
    let mut moved_any = false;
    loop {
        let left_size = cells.iter().filter(|&&c| in_left[c]).count();
        let donor = match left_size.cmp(&target_left) {
            std::cmp::Ordering::Greater => true,
            std::cmp::Ordering::Less => false,
            std::cmp::Ordering::Equal => return moved_any,
        };
        // Boundary cells of the donor side, best cut gain first.
        let mut candidates: Vec<(i64, usize)> = cells
            .iter()
            .copied()
            .filter(|&c| in_left[c] == donor)
            .filter_map(|c| {
                let mut cross = 0i64;
                let mut same = 0i64;
                for &d in &adj[c] {
                    if member.is_member[d] {
                        if in_left[d] == donor {
                            same += 1;
                        } else {
                            cross += 1;
                        }
                    }
                }
                (cross > 0).then_some((same - cross, c))
            })
            .collect();
        candidates.sort_unstable();
        let mut moved = false;
        for &(_, c) in &candidates {
            in_left[c] = !donor;
            if components_of_side(cells, adj, member, in_left, donor).len() <= 1 {
                moved = true;
                moved_any = true;
                break;
            }
            in_left[c] = donor; // undo: the move would split the donor
        }
        if !moved {
            return moved_any;
        }
    }
}

fn components_of_side(
    cells: &[usize],
    adj: &[Vec<usize>],
    member: &MemberSet,
    in_left: &[bool],
    side: bool,
) -> Vec<Vec<usize>> {
    let mut seen = vec![false; adj.len()];
    let mut comps = Vec::new();
    for &c in cells {
        if in_left[c] != side || seen[c] {
            continue;
        }
        let mut comp = Vec::new();
        let mut stack = vec![c];
        seen[c] = true;
        while let Some(u) = stack.pop() {
            comp.push(u);
            for &v in &adj[u] {
                if member.is_member[v] && in_left[v] == side && !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        comps.push(comp);
    }
    comps
}

#[derive(Deserialize)]
struct PartitionFile {
    #[serde(rename = "subdomainOf")]
    subdomain_of: Vec<usize>,
}

/// Read a partition from `{ "subdomainOf": [s0, s1, ...] }` with 0-based ids.
pub fn import_partition(path: impl AsRef<Path>, mesh: &PolyMesh3D) -> Result<Partition, DecompError> {
    let text = fs::read_to_string(path)?;
    let file: PartitionFile =
        serde_json::from_str(&text).map_err(|e| DecompError::Schema(e.to_string()))?;
    if file.subdomain_of.len() != mesh.cells.len() {
        return Err(DecompError::Schema(format!(
            "partition has {} entries for {} cells",
            file.subdomain_of.len(),
            mesh.cells.len()
        )));
    }
    let count = file.subdomain_of.iter().copied().max().map_or(0, |m| m + 1);
    let partition = Partition {
        subdomain_of: file.subdomain_of,
        count,
        nominal_h: (1.0f64 / count.max(1) as f64).cbrt(),
    };
    partition.check_nonempty()?;
    Ok(partition)
}

pub fn export_partition(partition: &Partition, path: impl AsRef<Path>) -> Result<(), DecompError> {
    let ids: Vec<String> = partition.subdomain_of.iter().map(|s| s.to_string()).collect();
    fs::write(path, format!("{{\"subdomainOf\": [{}]}}\n", ids.join(", ")))?;
    Ok(())
}
