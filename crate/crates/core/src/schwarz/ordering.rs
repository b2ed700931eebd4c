//! Fill-reducing ordering for sparse Cholesky.
//!
//! Minimum-degree on the quotient graph with element absorption and the
//! Amestoy-Davis-Duff approximate external degree. The approximation only
//! affects fill quality, never correctness of the factorization, so ties and
//! degree estimates are resolved deterministically (smallest index first).

use std::cmp::Reverse;
use std::collections::BinaryHeap;

/// Compute a permutation `perm` such that eliminating `perm[0], perm[1], ...`
/// keeps fill-in low. `adj` is the symmetric graph of the matrix without the
/// diagonal.
pub fn min_degree(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    if n == 0 {
        return Vec::new();
    }

    // Quotient graph state. Eliminated variables become elements; absorbed
    // elements are dropped from all adjacency lists they appear in.
    let mut var_adj: Vec<Vec<usize>> = adj.to_vec();
    let mut elem_adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut elem_vars: Vec<Vec<usize>> = Vec::new();
    let mut elem_alive: Vec<bool> = Vec::new();
    let mut eliminated = vec![false; n];
    let mut degree: Vec<usize> = var_adj.iter().map(Vec::len).collect();

    let mut heap: BinaryHeap<Reverse<(usize, usize)>> = BinaryHeap::with_capacity(2 * n);
    for (v, &d) in degree.iter().enumerate() {
        heap.push(Reverse((d, v)));
    }

    let mut stamp = vec![0u32; n];
    let mut cur_stamp = 0u32;
    let mut elem_stamp: Vec<u32> = Vec::new();
    let mut external: Vec<usize> = Vec::new();

    let mut perm = Vec::with_capacity(n);
    while perm.len() < n {
        let pivot = loop {
            let Reverse((d, v)) = heap.pop().expect("heap exhausted before ordering finished");
            if !eliminated[v] && degree[v] == d {
                break v;
            }
        };
        eliminated[pivot] = true;
        perm.push(pivot);

        // Boundary of the new element: uneliminated neighbors through both
        // plain edges and adjacent elements.
        cur_stamp += 1;
        stamp[pivot] = cur_stamp;
        let mut boundary: Vec<usize> = Vec::new();
        for &v in &var_adj[pivot] {
            if !eliminated[v] && stamp[v] != cur_stamp {
                stamp[v] = cur_stamp;
                boundary.push(v);
            }
        }
        let absorbed: Vec<usize> = elem_adj[pivot].iter().copied().filter(|&e| elem_alive[e]).collect();
        for &e in &absorbed {
            for &v in &elem_vars[e] {
                if !eliminated[v] && stamp[v] != cur_stamp {
                    stamp[v] = cur_stamp;
                    boundary.push(v);
                }
            }
            elem_alive[e] = false;
        }
        boundary.sort_unstable();

        let new_elem = elem_vars.len();
        elem_vars.push(boundary.clone());
        elem_alive.push(true);
        elem_stamp.push(0);
        external.push(0);

        // |Le \ Lp| for every live element touching the boundary.
        for &v in &boundary {
            for &e in &elem_adj[v] {
                if e != new_elem && elem_alive[e] {
                    if elem_stamp[e] != cur_stamp {
                        elem_stamp[e] = cur_stamp;
                        external[e] = elem_vars[e].iter().filter(|&&u| !eliminated[u]).count();
                    }
                    external[e] -= 1; // v is in Lp, remove from the external count
                }
            }
        }

        let lp_size = boundary.len();
        for &v in &boundary {
            // Prune edges now covered by the new element, and drop dead elements.
            var_adj[v].retain(|&u| u != pivot && !eliminated[u] && stamp[u] != cur_stamp);
            elem_adj[v].retain(|&e| elem_alive[e]);
            elem_adj[v].push(new_elem);

            // Approximate external degree.
            let mut d = var_adj[v].len() + (lp_size - 1);
            for &e in &elem_adj[v] {
                if e != new_elem && elem_stamp[e] == cur_stamp {
                    d += external[e];
                }
            }
            let d = d.min(n - perm.len()).min(degree[v] + lp_size - 1);
            degree[v] = d;
            heap.push(Reverse((d, v)));
        }
    }
    perm
}
