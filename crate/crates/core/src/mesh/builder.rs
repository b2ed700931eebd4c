//! Welds independently generated cells into a conforming mesh.
//!
//! Generators that produce each cell separately (Voronoi clipping, clipped hex
//! tilings) emit every cell as a list of outward-oriented point loops. The
//! builder merges coincident vertices within a tolerance, identifies shared
//! faces by their vertex sets and assigns orientation signs.

use std::collections::HashMap;

use super::{MeshError, PolyMesh3D};
use crate::{Point3, Vector3};

pub struct MeshBuilder {
    tol: f64,
    vertices: Vec<Point3>,
    buckets: HashMap<(i64, i64, i64), Vec<usize>>,
    face_index: HashMap<Vec<usize>, usize>,
    face_loops: Vec<Vec<usize>>,
    face_normals: Vec<Vector3>,
    cells: Vec<Vec<(usize, i8)>>,
}

impl MeshBuilder {
    /// `tol`: vertices closer than this are merged.
    pub fn new(tol: f64) -> Self {
        assert!(tol > 0.0);
        Self {
            tol,
            vertices: Vec::new(),
            buckets: HashMap::new(),
            face_index: HashMap::new(),
            face_loops: Vec::new(),
            face_normals: Vec::new(),
            cells: Vec::new(),
        }
    }

    fn bucket_of(&self, p: &Point3) -> (i64, i64, i64) {
        let s = 1.0 / (2.0 * self.tol);
        ((p.x * s).floor() as i64, (p.y * s).floor() as i64, (p.z * s).floor() as i64)
    }

    fn vertex_id(&mut self, p: Point3) -> usize {
        let (bx, by, bz) = self.bucket_of(&p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(ids) = self.buckets.get(&(bx + dx, by + dy, bz + dz)) {
                        for &id in ids {
                            if (self.vertices[id] - p).norm() <= self.tol {
                                return id;
                            }
                        }
                    }
                }
            }
        }
        let id = self.vertices.len();
        self.vertices.push(p);
        self.buckets.entry((bx, by, bz)).or_default().push(id);
        id
    }

    /// Add one cell given as outward-oriented faces (counter-clockwise when
    /// seen from outside the cell).
    pub fn add_cell(&mut self, faces: &[Vec<Point3>]) -> Result<(), MeshError> {
        let cell_id = self.cells.len();
        let mut refs = Vec::with_capacity(faces.len());
        for pts in faces {
            let mut loop_: Vec<usize> = pts.iter().map(|&p| self.vertex_id(p)).collect();
            loop_.dedup();
            while loop_.len() > 1 && loop_.first() == loop_.last() {
                loop_.pop();
            }
            if loop_.len() < 3 {
                return Err(MeshError::Topology(format!(
                    "cell {cell_id}: face collapsed to fewer than 3 vertices after welding"
                )));
            }
            let normal = loop_normal(&loop_, &self.vertices);

            let mut key = loop_.clone();
            key.sort_unstable();
            let (face, sign) = match self.face_index.get(&key) {
                Some(&f) => {
                    let s = if normal.dot(&self.face_normals[f]) > 0.0 { 1 } else { -1 };
                    (f, s)
                }
                None => {
                    let f = self.face_loops.len();
                    self.face_index.insert(key, f);
                    self.face_loops.push(loop_);
                    self.face_normals.push(normal);
                    (f, 1)
                }
            };
            refs.push((face, sign));
        }
        self.cells.push(refs);
        Ok(())
    }

    pub fn build(self) -> Result<PolyMesh3D, MeshError> {
        PolyMesh3D::from_connectivity(self.vertices, self.face_loops, self.cells)
    }
}

fn loop_normal(loop_: &[usize], vertices: &[Point3]) -> Vector3 {
    let c = super::geometry::centroid_of(&loop_.iter().map(|&v| vertices[v]).collect::<Vec<_>>());
    let mut n = Vector3::zeros();
    for i in 0..loop_.len() {
        let a = vertices[loop_[i]] - c;
        let b = vertices[loop_[(i + 1) % loop_.len()]] - c;
        n += a.cross(&b);
    }
    n
}
