//! Voronoi meshes from jittered-lattice seeds.
//!
//! Each cell is computed by clipping the unit cube with bisector half-spaces
//! against neighbor seeds from a 2-ring lattice neighborhood. With jitter
//! below 0.5 the seeds keep their lattice order, which bounds the set of
//! possible Voronoi neighbors; jitter 0 reproduces the cubic mesh.

use std::collections::HashMap;

use super::builder::MeshBuilder;
use super::{MeshError, PolyMesh3D};
use crate::{rng, Point3, Vector3};

/// On-plane classification tolerance for clipping (absolute; the domain is the
/// unit cube).
const CLIP_TOL: f64 = 1e-12;
/// Faces smaller than this are slivers left by round-off and must vanish
/// during vertex merging.
const MIN_FACE_AREA: f64 = 1e-14;

/// Voronoi mesh of `n^3` seeds `(i+0.5)/n` perturbed by `jitter * U[-1,1]^3 / n`.
pub fn generate_voronoi_mesh(n: usize, jitter: f64, rng_seed: u64) -> Result<PolyMesh3D, MeshError> {
    assert!(n >= 1, "n must be positive");
    assert!((0.0..0.5).contains(&jitter), "jitter must lie in [0, 0.5)");

    let h = 1.0 / n as f64;
    let merge_tol = 1e-10 / n as f64;
    let sid = |i: usize, j: usize, k: usize| (k * n + j) * n + i;

    let mut seeds = Vec::with_capacity(n * n * n);
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                let c = sid(i, j, k) as u64;
                seeds.push(Point3::new(
                    (i as f64 + 0.5) * h + jitter * h * rng::symmetric(rng_seed, 3 * c),
                    (j as f64 + 0.5) * h + jitter * h * rng::symmetric(rng_seed, 3 * c + 1),
                    (k as f64 + 0.5) * h + jitter * h * rng::symmetric(rng_seed, 3 * c + 2),
                ));
            }
        }
    }

    // 2-ring lattice offsets, nearest bisectors first.
    let mut offsets: Vec<(i64, i64, i64)> = Vec::new();
    for di in -2i64..=2 {
        for dj in -2i64..=2 {
            for dk in -2i64..=2 {
                if (di, dj, dk) != (0, 0, 0) {
                    offsets.push((di, dj, dk));
                }
            }
        }
    }
    offsets.sort_by_key(|&(a, b, c)| (a * a + b * b + c * c, a, b, c));

    let mut builder = MeshBuilder::new(merge_tol);
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                let cell_id = sid(i, j, k);
                let seed = seeds[cell_id];
                let mut cell = ConvexCell::unit_cube();
                for &(di, dj, dk) in &offsets {
                    let (ni, nj, nk) = (i as i64 + di, j as i64 + dj, k as i64 + dk);
                    if ni < 0 || nj < 0 || nk < 0 || ni >= n as i64 || nj >= n as i64 || nk >= n as i64 {
                        continue;
                    }
                    let other = seeds[sid(ni as usize, nj as usize, nk as usize)];
                    let dir = other - seed;
                    let normal = dir / dir.norm();
                    let offset = normal.dot(&(seed.coords + other.coords)) / 2.0;
                    cell.clip(normal, offset, CLIP_TOL).map_err(|reason| {
                        MeshError::DegenerateCell { cell: cell_id, reason }
                    })?;
                }
                let faces = cell.finish(merge_tol).map_err(|reason| {
                    MeshError::DegenerateCell { cell: cell_id, reason }
                })?;
                builder.add_cell(&faces)?;
            }
        }
    }
    builder.build()
}

/// Convex polyhedron under successive half-space clipping.
struct ConvexCell {
    verts: Vec<Point3>,
    faces: Vec<Vec<usize>>,
}

#[derive(Clone, Copy, PartialEq)]
enum Side {
    In,
    On,
    Out,
}

impl ConvexCell {
    fn unit_cube() -> Self {
        let verts = vec![
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(1.0, 1.0, 0.0),
            Point3::new(0.0, 1.0, 0.0),
            Point3::new(0.0, 0.0, 1.0),
            Point3::new(1.0, 0.0, 1.0),
            Point3::new(1.0, 1.0, 1.0),
            Point3::new(0.0, 1.0, 1.0),
        ];
        // Outward-oriented loops.
        let faces = vec![
            vec![0, 3, 2, 1], // z = 0
            vec![4, 5, 6, 7], // z = 1
            vec![0, 4, 7, 3], // x = 0
            vec![1, 2, 6, 5], // x = 1
            vec![0, 1, 5, 4], // y = 0
            vec![3, 7, 6, 2], // y = 1
        ];
        Self { verts, faces }
    }

    /// Intersect with the half-space `normal . x <= offset`.
    fn clip(&mut self, normal: Vector3, offset: f64, tol: f64) -> Result<(), String> {
        let side: Vec<Side> = self
            .verts
            .iter()
            .map(|p| {
                let s = normal.dot(&p.coords) - offset;
                if s > tol {
                    Side::Out
                } else if s < -tol {
                    Side::In
                } else {
                    Side::On
                }
            })
            .collect();
        if !side.contains(&Side::Out) {
            return Ok(());
        }
        if !side.contains(&Side::In) {
            return Err("cell clipped away entirely".into());
        }

        let mut crossings: HashMap<(usize, usize), usize> = HashMap::new();
        let mut crossing = |verts: &mut Vec<Point3>, a: usize, b: usize| -> usize {
            let key = (a.min(b), a.max(b));
            *crossings.entry(key).or_insert_with(|| {
                let sa = normal.dot(&verts[a].coords) - offset;
                let sb = normal.dot(&verts[b].coords) - offset;
                let t = sa / (sa - sb);
                let p = verts[a] + t * (verts[b] - verts[a]);
                verts.push(p);
                verts.len() - 1
            })
        };

        let mut new_faces: Vec<Vec<usize>> = Vec::with_capacity(self.faces.len() + 1);
        let mut cap_edges: HashMap<usize, usize> = HashMap::new(); // start -> end
        let mut on_plane = vec![false; self.verts.len()];
        for (v, &s) in side.iter().enumerate() {
            on_plane[v] = s == Side::On;
        }

        for loop_ in &self.faces {
            let m = loop_.len();
            let had_out = loop_.iter().any(|&v| side[v] == Side::Out);
            if !had_out {
                new_faces.push(loop_.clone());
                continue;
            }
            let mut next: Vec<usize> = Vec::with_capacity(m + 2);
            for k in 0..m {
                let a = loop_[k];
                let b = loop_[(k + 1) % m];
                if side[a] != Side::Out {
                    next.push(a);
                }
                if (side[a] == Side::In && side[b] == Side::Out)
                    || (side[a] == Side::Out && side[b] == Side::In)
                {
                    let c = crossing(&mut self.verts, a, b);
                    if on_plane.len() < self.verts.len() {
                        on_plane.resize(self.verts.len(), false);
                    }
                    on_plane[c] = true;
                    next.push(c);
                }
            }
            next.dedup();
            while next.len() > 1 && next.first() == next.last() {
                next.pop();
            }
            if next.len() < 3 {
                continue; // face clipped away
            }
            // Cap edges run opposite to this face's traversal of the cut.
            let mm = next.len();
            for k in 0..mm {
                let u = next[k];
                let w = next[(k + 1) % mm];
                if on_plane[u] && on_plane[w] && cap_edges.insert(w, u).is_some() {
                    return Err("ambiguous cut chain (duplicate cap edge start)".into());
                }
            }
            new_faces.push(next);
        }

        if cap_edges.is_empty() {
            return Err("cut produced no cap edges".into());
        }
        let start = *cap_edges.keys().min().unwrap();
        let mut cap = vec![start];
        let mut cur = start;
        loop {
            let Some(&nxt) = cap_edges.get(&cur) else {
                return Err("cut chain does not close".into());
            };
            if nxt == start {
                break;
            }
            cap.push(nxt);
            cur = nxt;
            if cap.len() > cap_edges.len() {
                return Err("cut chain does not close".into());
            }
        }
        if cap.len() != cap_edges.len() {
            return Err("cut chain left disconnected segments".into());
        }
        if cap.len() >= 3 {
            new_faces.push(cap);
        }
        self.faces = new_faces;
        self.compact();
        Ok(())
    }

    /// Drop vertices no longer referenced by any face.
    fn compact(&mut self) {
        let mut used = vec![false; self.verts.len()];
        for loop_ in &self.faces {
            for &v in loop_ {
                used[v] = true;
            }
        }
        let mut remap = vec![usize::MAX; self.verts.len()];
        let mut verts = Vec::with_capacity(self.verts.len());
        for (v, &u) in used.iter().enumerate() {
            if u {
                remap[v] = verts.len();
                verts.push(self.verts[v]);
            }
        }
        for loop_ in &mut self.faces {
            for v in loop_.iter_mut() {
                *v = remap[*v];
            }
        }
        self.verts = verts;
    }

    /// Merge vertices within `merge_tol`, drop collapsed faces and verify no
    /// sliver faces survive. Returns outward point loops.
    fn finish(mut self, merge_tol: f64) -> Result<Vec<Vec<Point3>>, String> {
        // Greedy clustering: map each vertex to the first earlier vertex in range.
        let mut canon: Vec<usize> = (0..self.verts.len()).collect();
        for v in 0..self.verts.len() {
            for u in 0..v {
                if canon[u] == u && (self.verts[v] - self.verts[u]).norm() <= merge_tol {
                    canon[v] = u;
                    break;
                }
            }
        }
        for loop_ in &mut self.faces {
            for v in loop_.iter_mut() {
                *v = canon[*v];
            }
            loop_.dedup();
            while loop_.len() > 1 && loop_.first() == loop_.last() {
                loop_.pop();
            }
        }
        self.faces.retain(|l| l.len() >= 3);
        if self.faces.len() < 4 {
            return Err("fewer than 4 faces after degenerate cleanup".into());
        }

        let mut out = Vec::with_capacity(self.faces.len());
        for loop_ in &self.faces {
            let pts: Vec<Point3> = loop_.iter().map(|&v| self.verts[v]).collect();
            let c = super::geometry::centroid_of(&pts);
            let mut va = Vector3::zeros();
            for k in 0..pts.len() {
                va += (pts[k] - c).cross(&(pts[(k + 1) % pts.len()] - c));
            }
            let area = 0.5 * va.norm();
            if area < MIN_FACE_AREA {
                return Err(format!("sliver face of area {area:.3e} survived vertex merging"));
            }
            out.push(pts);
        }
        Ok(out)
    }
}
