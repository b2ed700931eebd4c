//! Geometric quantities: face areas/centroids/planes, cell volumes/centroids,
//! diameters.

use super::{MeshError, PolyMesh3D};
use crate::{Point3, Vector3};

/// Relative planarity tolerance: deviations up to `1e-8 * h_f` are absorbed by
/// working in the best-fit plane; anything larger is an error.
pub const PLANARITY_REL_TOL: f64 = 1e-8;

/// Fill derived geometry on all faces and cells.
///
/// Face area and centroid come from a fan triangulation around the loop
/// centroid; cell volume and centroid from the divergence theorem over the
/// outward-oriented boundary.
pub fn compute_geometry(mesh: &mut PolyMesh3D) -> Result<(), MeshError> {
    for f in 0..mesh.faces.len() {
        let loop_: Vec<Point3> = mesh.faces[f].vertex_loop.iter().map(|&v| mesh.vertices[v]).collect();
        let m = loop_.len();

        let mut diameter: f64 = 0.0;
        for i in 0..m {
            for j in i + 1..m {
                diameter = diameter.max((loop_[i] - loop_[j]).norm());
            }
        }

        // Newell vector area about the loop centroid.
        let c0 = centroid_of(&loop_);
        let mut vec_area = Vector3::zeros();
        for i in 0..m {
            let a = loop_[i] - c0;
            let b = loop_[(i + 1) % m] - c0;
            vec_area += a.cross(&b);
        }
        vec_area *= 0.5;
        let area = vec_area.norm();
        if area <= 0.0 || area.is_nan() {
            return Err(MeshError::Topology(format!("face {f} has zero area")));
        }
        let normal = vec_area / area;

        // Signed fan triangulation gives the area centroid.
        let mut centroid = Vector3::zeros();
        let mut signed_total = 0.0;
        for i in 0..m {
            let a = loop_[i];
            let b = loop_[(i + 1) % m];
            let tri_vec = 0.5 * (a - c0).cross(&(b - c0));
            let s = tri_vec.dot(&normal);
            signed_total += s;
            centroid += s * ((a.coords + b.coords + c0.coords) / 3.0);
        }
        let centroid = Point3::from(centroid / signed_total);

        let tol = PLANARITY_REL_TOL * diameter;
        let deviation = loop_
            .iter()
            .map(|p| (normal.dot(&(p - centroid))).abs())
            .fold(0.0, f64::max);
        if deviation > tol {
            return Err(MeshError::NonPlanarFace { face: f, deviation, tolerance: tol });
        }

        let face = &mut mesh.faces[f];
        face.normal = normal;
        face.offset = normal.dot(&centroid.coords);
        face.area = area;
        face.centroid = centroid;
        face.diameter = diameter;
    }

    for c in 0..mesh.cells.len() {
        let mut volume = 0.0;
        let mut moment = Vector3::zeros();
        for &(f, sign) in &mesh.cells[c].face_refs {
            let face = &mesh.faces[f];
            let loop_ = &face.vertex_loop;
            let m = loop_.len();
            let fc = face.centroid.coords;
            for i in 0..m {
                let (a, b) = if sign > 0 {
                    (loop_[i], loop_[(i + 1) % m])
                } else {
                    (loop_[(i + 1) % m], loop_[i])
                };
                let pa = mesh.vertices[a].coords;
                let pb = mesh.vertices[b].coords;
                // Tetrahedron (origin, fc, pa, pb), outward wound.
                let v6 = fc.dot(&pa.cross(&pb));
                volume += v6 / 6.0;
                moment += (v6 / 24.0) * (fc + pa + pb);
            }
        }
        if volume <= 0.0 || volume.is_nan() {
            return Err(MeshError::NegativeVolume { cell: c, volume });
        }
        let centroid = Point3::from(moment / volume);

        let vs = mesh.cell_vertices(c);
        let mut diameter: f64 = 0.0;
        for i in 0..vs.len() {
            for j in i + 1..vs.len() {
                diameter = diameter.max((mesh.vertices[vs[i]] - mesh.vertices[vs[j]]).norm());
            }
        }

        let cell = &mut mesh.cells[c];
        cell.volume = volume;
        cell.centroid = centroid;
        cell.diameter = diameter;
    }
    Ok(())
}

pub(crate) fn centroid_of(points: &[Point3]) -> Point3 {
    let mut s = Vector3::zeros();
    for p in points {
        s += p.coords;
    }
    Point3::from(s / points.len() as f64)
}
