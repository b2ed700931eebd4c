//! Structured mesh generators on the unit cube: axis-aligned cubes and
//! extruded hexagonal prisms.

use super::builder::MeshBuilder;
use super::PolyMesh3D;
use crate::Point3;

/// `n^3` axis-aligned cubic cells on `[0,1]^3`.
///
/// Vertices are ordered lexicographically by `(k, j, i)` with `i` (the x
/// index) fastest, cells likewise.
pub fn generate_cubic_mesh(n: usize) -> PolyMesh3D {
    assert!(n >= 1, "n must be positive");
    let np = n + 1;
    let h = 1.0 / n as f64;
    let vid = |i: usize, j: usize, k: usize| k * np * np + j * np + i;

    let mut vertices = Vec::with_capacity(np * np * np);
    for k in 0..np {
        for j in 0..np {
            for i in 0..np {
                vertices.push(Point3::new(i as f64 * h, j as f64 * h, k as f64 * h));
            }
        }
    }

    // Faces with +axis normals: x-faces, then y-faces, then z-faces.
    let mut loops: Vec<Vec<usize>> = Vec::with_capacity(3 * np * n * n);
    let xface = |i: usize, j: usize, k: usize| i * n * n + k * n + j;
    for i in 0..np {
        for k in 0..n {
            for j in 0..n {
                loops.push(vec![vid(i, j, k), vid(i, j + 1, k), vid(i, j + 1, k + 1), vid(i, j, k + 1)]);
            }
        }
    }
    let nx_faces = loops.len();
    let yface = |i: usize, j: usize, k: usize| nx_faces + j * n * n + i * n + k;
    for j in 0..np {
        for i in 0..n {
            for k in 0..n {
                loops.push(vec![vid(i, j, k), vid(i, j, k + 1), vid(i + 1, j, k + 1), vid(i + 1, j, k)]);
            }
        }
    }
    let nxy_faces = loops.len();
    let zface = |i: usize, j: usize, k: usize| nxy_faces + k * n * n + j * n + i;
    for k in 0..np {
        for j in 0..n {
            for i in 0..n {
                loops.push(vec![vid(i, j, k), vid(i + 1, j, k), vid(i + 1, j + 1, k), vid(i, j + 1, k)]);
            }
        }
    }

    let mut cells = Vec::with_capacity(n * n * n);
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                cells.push(vec![
                    (xface(i, j, k), -1),
                    (xface(i + 1, j, k), 1),
                    (yface(i, j, k), -1),
                    (yface(i, j + 1, k), 1),
                    (zface(i, j, k), -1),
                    (zface(i, j, k + 1), 1),
                ]);
            }
        }
    }

    PolyMesh3D::from_connectivity(vertices, loops, cells)
        .expect("structured cubic mesh is always valid")
}

/// Regular hexagonal tiling of the unit square, clipped to the boundary and
/// extruded into `n_layers` equal z-layers. Interior cells are hexagonal
/// prisms; boundary cells are prisms over clipped convex polygons.
pub fn generate_hexprism_mesh(n_hex: usize, n_layers: usize) -> PolyMesh3D {
    assert!(n_hex >= 1 && n_layers >= 1, "parameters must be positive");
    let r = 1.0 / (1.5 * n_hex as f64); // circumradius; column spacing 1.5 r
    let dx = 1.5 * r;
    let dy = 3f64.sqrt() * r;

    let mut polygons: Vec<Vec<(f64, f64)>> = Vec::new();
    let i_max = (1.0 / dx).ceil() as i64 + 1;
    let j_max = (1.0 / dy).ceil() as i64 + 1;
    for i in -1..=i_max {
        for j in -1..=j_max {
            let cx = i as f64 * dx;
            let cy = j as f64 * dy + if i.rem_euclid(2) == 1 { dy / 2.0 } else { 0.0 };
            let hex: Vec<(f64, f64)> = (0..6)
                .map(|k| {
                    let t = std::f64::consts::PI / 3.0 * k as f64;
                    (cx + r * t.cos(), cy + r * t.sin())
                })
                .collect();
            if let Some(poly) = clip_to_unit_square(&hex) {
                polygons.push(poly);
            }
        }
    }

    let mut builder = MeshBuilder::new(1e-9 * r);
    let dz = 1.0 / n_layers as f64;
    for poly in &polygons {
        for l in 0..n_layers {
            let z0 = l as f64 * dz;
            let z1 = (l + 1) as f64 * dz;
            let m = poly.len();
            let mut faces: Vec<Vec<Point3>> = Vec::with_capacity(m + 2);
            // bottom (outward -z): reversed loop
            faces.push(poly.iter().rev().map(|&(x, y)| Point3::new(x, y, z0)).collect());
            // top (outward +z)
            faces.push(poly.iter().map(|&(x, y)| Point3::new(x, y, z1)).collect());
            for e in 0..m {
                let (ax, ay) = poly[e];
                let (bx, by) = poly[(e + 1) % m];
                faces.push(vec![
                    Point3::new(ax, ay, z0),
                    Point3::new(bx, by, z0),
                    Point3::new(bx, by, z1),
                    Point3::new(ax, ay, z1),
                ]);
            }
            builder
                .add_cell(&faces)
                .expect("hex prism cells are non-degenerate by construction");
        }
    }
    builder.build().expect("hex prism tiling welds into a valid mesh")
}

/// Sutherland-Hodgman clip of a counter-clockwise convex polygon against the
/// unit square. Returns `None` when the intersection is (numerically) empty.
fn clip_to_unit_square(poly: &[(f64, f64)]) -> Option<Vec<(f64, f64)>> {
    const EPS: f64 = 1e-12;
    // Half-planes as signed distance functions, >= 0 inside.
    let planes: [Box<dyn Fn(f64, f64) -> f64>; 4] = [
        Box::new(|x, _| x),
        Box::new(|x, _| 1.0 - x),
        Box::new(|_, y| y),
        Box::new(|_, y| 1.0 - y),
    ];
    let mut current = poly.to_vec();
    for plane in &planes {
        let mut next = Vec::with_capacity(current.len() + 2);
        let m = current.len();
        for k in 0..m {
            let a = current[k];
            let b = current[(k + 1) % m];
            let da = plane(a.0, a.1);
            let db = plane(b.0, b.1);
            if da >= -EPS {
                next.push(a);
            }
            if (da > EPS && db < -EPS) || (da < -EPS && db > EPS) {
                let t = da / (da - db);
                next.push((a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1)));
            }
        }
        current = next;
        if current.len() < 3 {
            return None;
        }
    }
    // Remove (numerically) repeated consecutive points.
    let mut cleaned: Vec<(f64, f64)> = Vec::with_capacity(current.len());
    for &p in &current {
        if let Some(&q) = cleaned.last() {
            if (p.0 - q.0).abs() < EPS && (p.1 - q.1).abs() < EPS {
                continue;
            }
        }
        cleaned.push(p);
    }
    while cleaned.len() > 1 {
        let (p, q) = (cleaned[0], *cleaned.last().unwrap());
        if (p.0 - q.0).abs() < EPS && (p.1 - q.1).abs() < EPS {
            cleaned.pop();
        } else {
            break;
        }
    }
    if cleaned.len() < 3 || polygon_area(&cleaned) < 1e-14 {
        return None;
    }
    Some(cleaned)
}

fn polygon_area(poly: &[(f64, f64)]) -> f64 {
    let m = poly.len();
    let mut s = 0.0;
    for k in 0..m {
        let (ax, ay) = poly[k];
        let (bx, by) = poly[(k + 1) % m];
        s += ax * by - bx * ay;
    }
    0.5 * s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_counts() {
        let m1 = generate_cubic_mesh(1);
        assert_eq!((m1.cells.len(), m1.vertices.len(), m1.faces.len(), m1.edges.len()), (1, 8, 6, 12));
        let m2 = generate_cubic_mesh(2);
        assert_eq!((m2.cells.len(), m2.vertices.len(), m2.faces.len()), (8, 27, 36));
        let m4 = generate_cubic_mesh(4);
        assert_eq!(m4.cells.len(), 64);
        assert!((m4.total_volume() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cubic_boundary_flags() {
        let m = generate_cubic_mesh(2);
        let interior: Vec<usize> =
            (0..m.vertices.len()).filter(|&v| !m.boundary_vertex[v]).collect();
        assert_eq!(interior.len(), 1);
        assert!((m.vertices[interior[0]] - Point3::new(0.5, 0.5, 0.5)).norm() < 1e-14);
    }

    #[test]
    fn cubic_deterministic() {
        let a = generate_cubic_mesh(3);
        let b = generate_cubic_mesh(3);
        assert_eq!(a.vertices, b.vertices);
        assert_eq!(a.edges, b.edges);
    }

    #[test]
    fn hexprism_tiles_the_cube() {
        for (nh, nl) in [(1, 1), (2, 3), (4, 2)] {
            let m = generate_hexprism_mesh(nh, nl);
            assert!(
                (m.total_volume() - 1.0).abs() < 1e-10,
                "volume {} for ({nh},{nl})",
                m.total_volume()
            );
            m.validate_topology().unwrap();
        }
    }

    #[test]
    fn hexprism_interior_cells_are_hex_prisms() {
        let m = generate_hexprism_mesh(4, 2);
        let interior_full_hex = m
            .cells
            .iter()
            .filter(|c| c.face_refs.len() == 8)
            .count();
        assert!(interior_full_hex > 0, "expected at least one uncut hexagonal prism");
    }

    #[test]
    fn hexprism_bases_are_convex() {
        // Every cell's top face (+z normal) must be a convex polygon.
        let m = generate_hexprism_mesh(3, 4);
        for cell in &m.cells {
            for &(f, sign) in &cell.face_refs {
                let face = &m.faces[f];
                if (face.normal.z * sign as f64) > 0.9 {
                    let pts: Vec<(f64, f64)> = face
                        .vertex_loop
                        .iter()
                        .map(|&v| (m.vertices[v].x, m.vertices[v].y))
                        .collect();
                    let n = pts.len();
                    let mut sign_seen = 0.0f64;
                    for k in 0..n {
                        let a = pts[k];
                        let b = pts[(k + 1) % n];
                        let c = pts[(k + 2) % n];
                        let cross = (b.0 - a.0) * (c.1 - b.1) - (b.1 - a.1) * (c.0 - b.0);
                        if cross.abs() > 1e-12 {
                            if sign_seen == 0.0 {
                                sign_seen = cross.signum();
                            } else {
                                assert_eq!(cross.signum(), sign_seen, "non-convex base polygon");
                            }
                        }
                    }
                    assert!(face.area > 0.0);
                }
            }
        }
    }
}
