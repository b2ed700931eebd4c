//! Energy projectors onto linear polynomials and the stabilized local
//! stiffness.
//!
//! On a face, the projector maps the vertex values to coefficients in the
//! scaled monomial basis `{1, xi/h_f, eta/h_f}` of the face plane; the
//! gradient equations are boundary integrals of the piecewise-linear trace
//! (exact by the trapezoid rule per edge) and the constant is fixed by
//! matching the vertex average. The element projector works the same way in
//! `{1, (x-x_E)/h_E, (y-y_E)/h_E, (z-z_E)/h_E}`, with right-hand sides
//! assembled from the face moments `int_f u = int_f proj_f u`.

use nalgebra::DMatrix;

use super::VemError;
use crate::mesh::{PolyFace, PolyMesh3D};
use crate::{Point3, Vector3};

/// Local orthonormal frame of a face; origin at the area centroid.
#[derive(Debug, Clone)]
pub struct FaceFrame {
    pub origin: Point3,
    pub e1: Vector3,
    pub e2: Vector3,
    /// Monomial scale `h_f`.
    pub scale: f64,
}

impl FaceFrame {
    pub fn of_face(face: &PolyFace, mesh: &PolyMesh3D) -> Self {
        let a = mesh.vertices[face.vertex_loop[0]];
        let b = mesh.vertices[face.vertex_loop[1]];
        let ab = b - a;
        let e1 = (ab - face.normal * face.normal.dot(&ab)).normalize();
        let e2 = face.normal.cross(&e1);
        Self { origin: face.centroid, e1, e2, scale: face.diameter }
    }

    /// In-plane coordinates of a point (its projection onto the plane).
    pub fn local(&self, p: &Point3) -> (f64, f64) {
        let d = p - self.origin;
        (d.dot(&self.e1), d.dot(&self.e2))
    }

    /// Scaled monomials `(1, xi/h, eta/h)` at a point.
    pub fn monomials(&self, p: &Point3) -> [f64; 3] {
        let (xi, eta) = self.local(p);
        [1.0, xi / self.scale, eta / self.scale]
    }
}

/// Face projector plus the 2D VEM face stiffness it induces.
#[derive(Debug, Clone)]
pub struct FaceProjector {
    pub frame: FaceFrame,
    /// `3 x m`: vertex values to projection coefficients.
    pub coeffs: DMatrix<f64>,
    /// `m x m` face Laplacian: consistency plus `h_f`-scaled nodal
    /// stabilization on the non-polynomial remainder.
    pub stiffness: DMatrix<f64>,
    pub area: f64,
}

impl FaceProjector {
    /// Row mapping vertex values to the face moment `int_f u`; the in-plane
    /// monomials have zero mean about the centroid, so only the constant
    /// coefficient contributes.
    pub fn moment_row(&self) -> nalgebra::RowDVector<f64> {
        self.coeffs.row(0) * self.area
    }
}

/// Build the projector of one face.
pub fn build_face_projector(
    face_index: usize,
    mesh: &PolyMesh3D,
) -> Result<FaceProjector, VemError> {
    let face = &mesh.faces[face_index];
    let frame = FaceFrame::of_face(face, mesh);
    let m = face.vertex_loop.len();
    let h = frame.scale;

    let local: Vec<(f64, f64)> = face
        .vertex_loop
        .iter()
        .map(|&v| frame.local(&mesh.vertices[v]))
        .collect();

    // B: gradient rows from the boundary integral, constant row from the
    // vertex average.
    let mut b = DMatrix::zeros(3, m);
    for i in 0..m {
        b[(0, i)] = 1.0 / m as f64;
    }
    for i in 0..m {
        let j = (i + 1) % m;
        let (ax, ay) = local[i];
        let (bx, by) = local[j];
        let (tx, ty) = (bx - ax, by - ay);
        // Outward normal of a counter-clockwise loop, length = edge length.
        let (nx, ny) = (ty, -tx);
        for (col, w) in [(i, 0.5), (j, 0.5)] {
            b[(1, col)] += w * nx / h;
            b[(2, col)] += w * ny / h;
        }
    }

    let mut d = DMatrix::zeros(m, 3);
    for i in 0..m {
        d[(i, 0)] = 1.0;
        d[(i, 1)] = local[i].0 / h;
        d[(i, 2)] = local[i].1 / h;
    }

    let g = &b * &d;
    let g_inv = g
        .clone()
        .try_inverse()
        .ok_or(VemError::SingularFace { face: face_index })?;
    let coeffs = &g_inv * &b;

    let mut g_tilde = g.clone();
    for c in 0..3 {
        g_tilde[(0, c)] = 0.0;
    }
    let consistency = coeffs.transpose() * &g_tilde * &coeffs;
    let remainder = DMatrix::identity(m, m) - &d * &coeffs;
    let stiffness = consistency + h * remainder.transpose() * &remainder;

    Ok(FaceProjector { frame, coeffs, stiffness, area: face.area })
}

/// Face projectors for the whole mesh; computed once and shared between the
/// element assembly and the coarse-space face solves.
pub fn build_all_face_projectors(mesh: &PolyMesh3D) -> Result<Vec<FaceProjector>, VemError> {
    (0..mesh.faces.len()).map(|f| build_face_projector(f, mesh)).collect()
}

/// Element projector onto `P_1(E)` from the vertex values.
#[derive(Debug, Clone)]
pub struct ElementProjector {
    /// Global vertex ids of the cell, ascending; columns follow this order.
    pub vertices: Vec<usize>,
    /// `4 x m` coefficient matrix.
    pub coeffs: DMatrix<f64>,
    g_tilde: DMatrix<f64>,
    dof_monomials: DMatrix<f64>,
}

pub fn build_element_projector(
    cell_index: usize,
    mesh: &PolyMesh3D,
    face_projectors: &[FaceProjector],
) -> ElementProjector {
    let cell = &mesh.cells[cell_index];
    let vertices = mesh.cell_vertices(cell_index);
    let m = vertices.len();
    let h = cell.diameter;
    let x_e = cell.centroid;

    let local_of = |v: usize| vertices.binary_search(&v).expect("vertex of the cell");

    let mut b = DMatrix::zeros(4, m);
    for i in 0..m {
        b[(0, i)] = 1.0 / m as f64;
    }
    // Integration by parts: int_E grad m_a . grad u
    //   = sum_f (e_a . n_f / h) int_f u, with int_f u from the face moment.
    for &(f, sign) in &cell.face_refs {
        let fp = &face_projectors[f];
        let n_out = mesh.faces[f].normal * sign as f64;
        let moment = fp.moment_row();
        for (lf, &v) in mesh.faces[f].vertex_loop.iter().enumerate() {
            let col = local_of(v);
            for a in 0..3 {
                b[(1 + a, col)] += n_out[a] / h * moment[lf];
            }
        }
    }

    let mut d = DMatrix::zeros(m, 4);
    for (i, &v) in vertices.iter().enumerate() {
        let p = mesh.vertices[v] - x_e;
        d[(i, 0)] = 1.0;
        d[(i, 1)] = p.x / h;
        d[(i, 2)] = p.y / h;
        d[(i, 3)] = p.z / h;
    }

    let g = &b * &d;
    let g_inv = g
        .clone()
        .try_inverse()
        .expect("element projector system is nonsingular for a valid cell");
    let coeffs = g_inv * &b;

    let mut g_tilde = g.clone();
    for c in 0..4 {
        g_tilde[(0, c)] = 0.0;
    }

    ElementProjector { vertices, coeffs, g_tilde, dof_monomials: d }
}

/// Stabilized local stiffness
/// `K_E = rho (P^T G~ P + h_E (I - D P)^T (I - D P))`.
pub fn build_local_stiffness(
    diameter: f64,
    projector: &ElementProjector,
    rho: f64,
) -> DMatrix<f64> {
    let m = projector.vertices.len();
    let p = &projector.coeffs;
    let consistency = p.transpose() * &projector.g_tilde * p;
    let remainder = DMatrix::identity(m, m) - &projector.dof_monomials * p;
    let stabilization = remainder.transpose() * &remainder;
    rho * (consistency + diameter * stabilization)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_cubic_mesh, generate_voronoi_mesh};
    use nalgebra::DVector;

    fn hexagon_prism_mesh(r: f64) -> PolyMesh3D {
        let hex: Vec<Point3> = (0..6)
            .map(|k| {
                let t = std::f64::consts::PI / 3.0 * k as f64;
                Point3::new(r * t.cos(), r * t.sin(), 0.0)
            })
            .collect();
        let mut vertices = hex.clone();
        vertices.extend(hex.iter().map(|p| Point3::new(p.x, p.y, 1.0)));
        let mut loops: Vec<Vec<usize>> = vec![vec![0, 5, 4, 3, 2, 1], vec![6, 7, 8, 9, 10, 11]];
        for k in 0..6 {
            let k1 = (k + 1) % 6;
            loops.push(vec![k, k1, k1 + 6, k + 6]);
        }
        let cell = (0..8).map(|f| (f, 1)).collect();
        PolyMesh3D::from_connectivity(vertices, loops, vec![cell]).unwrap()
    }

    #[test]
    fn face_projector_reproduces_linears() {
        let mesh = generate_cubic_mesh(1);
        for f in 0..mesh.faces.len() {
            let fp = build_face_projector(f, &mesh).unwrap();
            let m = mesh.faces[f].vertex_loop.len();
            let h = fp.frame.scale;
            // u = xi: coefficients must be exactly (0, h, 0).
            let u = DVector::from_fn(m, |i, _| {
                fp.frame.local(&mesh.vertices[mesh.faces[f].vertex_loop[i]]).0
            });
            let c = &fp.coeffs * &u;
            assert!(c[0].abs() < 1e-12 && (c[1] - h).abs() < 1e-12 && c[2].abs() < 1e-12);
            // u = 1: projection is the constant 1.
            let ones = DVector::from_element(m, 1.0);
            let c1 = &fp.coeffs * &ones;
            assert!((c1[0] - 1.0).abs() < 1e-12 && c1[1].abs() < 1e-13 && c1[2].abs() < 1e-13);
        }
    }

    #[test]
    fn face_frame_is_orthonormal_with_unit_monomial_at_centroid() {
        let mesh = generate_voronoi_mesh(2, 0.3, 4).unwrap();
        for f in 0..mesh.faces.len() {
            let frame = FaceFrame::of_face(&mesh.faces[f], &mesh);
            assert!((frame.e1.norm() - 1.0).abs() < 1e-12);
            assert!((frame.e2.norm() - 1.0).abs() < 1e-12);
            assert!(frame.e1.dot(&frame.e2).abs() < 1e-12);
            let m = frame.monomials(&mesh.faces[f].centroid);
            assert_eq!(m[0], 1.0);
            assert!(m[1].abs() < 1e-14 && m[2].abs() < 1e-14);
        }
    }

    /// Quadrature oracle: assemble the same projection equations from dense
    /// triangulated surface integrals instead of boundary integrals.
    #[test]
    fn hexagon_quadratic_matches_quadrature_oracle() {
        let mesh = hexagon_prism_mesh(0.7);
        let f = 0; // bottom hexagon
        let fp = build_face_projector(f, &mesh).unwrap();
        let loop_ = &mesh.faces[f].vertex_loop;
        let m = loop_.len();
        let h = fp.frame.scale;

        // Vertex values of u = xi^2.
        let u = DVector::from_fn(m, |i, _| {
            let (xi, _) = fp.frame.local(&mesh.vertices[loop_[i]]);
            xi * xi
        });
        let c = &fp.coeffs * &u;

        // Oracle: G c = rhs with rhs_a = int_f grad m_a . grad u computed by
        // midpoint quadrature over a fan triangulation (exact: the integrand
        // is linear), constant row from the vertex average.
        let mut rhs = [0.0f64; 3];
        let mut g = [[0.0f64; 3]; 3];
        for i in 0..m {
            let a = mesh.vertices[loop_[i]];
            let b = mesh.vertices[loop_[(i + 1) % m]];
            let (ax, ay) = fp.frame.local(&a);
            let (bx, by) = fp.frame.local(&b);
            let (cx, cy) = (0.0, 0.0); // centroid in frame coordinates
            let area2 = ((ax - cx) * (by - cy) - (bx - cx) * (ay - cy)).abs();
            let tri_area = 0.5 * area2;
            let (mx, _my) = ((ax + bx + cx) / 3.0, (ay + by + cy) / 3.0);
            // grad u = (2 xi, 0); grad m_1 = (1/h, 0); grad m_2 = (0, 1/h).
            rhs[1] += tri_area * 2.0 * mx / h;
            // grad terms of G: int grad m_a . grad m_b
            g[1][1] += tri_area / (h * h);
            g[2][2] += tri_area / (h * h);
        }
        // Constant row: average of monomials / average of u.
        for i in 0..m {
            let (xi, eta) = fp.frame.local(&mesh.vertices[loop_[i]]);
            g[0][0] += 1.0 / m as f64;
            g[0][1] += xi / h / m as f64;
            g[0][2] += eta / h / m as f64;
        }
        rhs[0] = u.iter().sum::<f64>() / m as f64;
        let gm = nalgebra::Matrix3::from_fn(|r, c| g[r][c]);
        let oracle = gm.lu().solve(&nalgebra::Vector3::from_row_slice(&rhs)).unwrap();
        for k in 0..3 {
            assert!(
                (c[k] - oracle[k]).abs() < 1e-10,
                "coefficient {k}: {} vs oracle {}",
                c[k],
                oracle[k]
            );
        }
    }

    #[test]
    fn element_projector_reproduces_linears() {
        let mesh = generate_cubic_mesh(1);
        let fps = build_all_face_projectors(&mesh).unwrap();
        let proj = build_element_projector(0, &mesh, &fps);
        let h = mesh.cells[0].diameter;
        let u = DVector::from_fn(proj.vertices.len(), |i, _| {
            let p = mesh.vertices[proj.vertices[i]];
            p.x + 2.0 * p.y + 3.0 * p.z
        });
        let c = &proj.coeffs * &u;
        let x_e = mesh.cells[0].centroid;
        let want0 = x_e.x + 2.0 * x_e.y + 3.0 * x_e.z;
        assert!((c[0] - want0).abs() < 1e-12);
        assert!((c[1] - h).abs() < 1e-12);
        assert!((c[2] - 2.0 * h).abs() < 1e-12);
        assert!((c[3] - 3.0 * h).abs() < 1e-12);
        // Nodal reproduction.
        let nodal = &proj.dof_monomials * &c;
        for i in 0..u.len() {
            assert!((nodal[i] - u[i]).abs() < 1e-12);
        }
        // Constants.
        let ones = DVector::from_element(u.len(), 1.0);
        let c1 = &proj.coeffs * &ones;
        assert!((c1[0] - 1.0).abs() < 1e-13);
        for k in 1..4 {
            assert!(c1[k].abs() < 1e-13);
        }
    }

    #[test]
    fn element_projector_quadratic_on_unit_cube() {
        // u = x^2: grad proj u = L2 projection of (2x, 0, 0) onto constants,
        // which is (1, 0, 0) since int_E 2x dV = 1 on the unit cube.
        let mesh = generate_cubic_mesh(1);
        let fps = build_all_face_projectors(&mesh).unwrap();
        let proj = build_element_projector(0, &mesh, &fps);
        let h = mesh.cells[0].diameter;
        let u = DVector::from_fn(proj.vertices.len(), |i, _| {
            let p = mesh.vertices[proj.vertices[i]];
            p.x * p.x
        });
        let c = &proj.coeffs * &u;
        assert!((c[1] / h * h - h).abs() < 1e-12); // c1 = h * du/dx = h
        assert!((c[1] - h).abs() < 1e-12);
        assert!(c[2].abs() < 1e-12 && c[3].abs() < 1e-12);
    }

    #[test]
    fn local_stiffness_kernel_and_linear_energy() {
        let mesh = generate_cubic_mesh(1);
        let fps = build_all_face_projectors(&mesh).unwrap();
        let proj = build_element_projector(0, &mesh, &fps);
        let rho = 2.5;
        let k = build_local_stiffness(mesh.cells[0].diameter, &proj, rho);
        let m = proj.vertices.len();
        let norm = k.amax();

        // Constants are energy-free.
        let ones = DVector::from_element(m, 1.0);
        let k1 = &k * &ones;
        assert!(k1.amax() <= 1e-10 * norm);

        // u = x: energy rho * |E| * |grad u|^2 = rho (stabilization inactive).
        let u = DVector::from_fn(m, |i, _| mesh.vertices[proj.vertices[i]].x);
        let energy = (&u.transpose() * &k * &u)[(0, 0)];
        assert!((energy - rho).abs() < 1e-12);

        // Symmetry.
        for i in 0..m {
            for j in 0..m {
                assert!((k[(i, j)] - k[(j, i)]).abs() <= 1e-12 * norm);
            }
        }
    }

    #[test]
    fn local_stiffness_psd_with_one_kernel_dimension() {
        let mesh = generate_voronoi_mesh(3, 0.3, 9).unwrap();
        let fps = build_all_face_projectors(&mesh).unwrap();
        for c in 0..mesh.cells.len() {
            let proj = build_element_projector(c, &mesh, &fps);
            let k = build_local_stiffness(mesh.cells[c].diameter, &proj, 1.0);
            let eig = k.clone().symmetric_eigen().eigenvalues;
            let lmax = eig.iter().cloned().fold(f64::MIN, f64::max);
            let small = eig.iter().filter(|&&l| l < 1e-8 * lmax).count();
            let negative = eig.iter().filter(|&&l| l < -1e-10 * lmax).count();
            assert_eq!(negative, 0, "cell {c} has a negative eigenvalue");
            assert_eq!(small, 1, "cell {c} kernel dimension != 1");
        }
    }

    #[test]
    fn consistency_on_polyhedral_cells() {
        // a_h^E(p, q) = rho int_E grad p . grad q for linears p, q.
        let mesh = generate_voronoi_mesh(2, 0.25, 3).unwrap();
        let fps = build_all_face_projectors(&mesh).unwrap();
        let rho = 3.0;
        for c in 0..mesh.cells.len() {
            let proj = build_element_projector(c, &mesh, &fps);
            let k = build_local_stiffness(mesh.cells[c].diameter, &proj, rho);
            let gp = Vector3::new(1.0, -2.0, 0.5);
            let gq = Vector3::new(0.3, 1.1, -0.7);
            let p = DVector::from_fn(proj.vertices.len(), |i, _| {
                gp.dot(&mesh.vertices[proj.vertices[i]].coords)
            });
            let q = DVector::from_fn(proj.vertices.len(), |i, _| {
                gq.dot(&mesh.vertices[proj.vertices[i]].coords)
            });
            let got = (&p.transpose() * &k * &q)[(0, 0)];
            let want = rho * mesh.cells[c].volume * gp.dot(&gq);
            assert!(
                (got - want).abs() <= 1e-10 * want.abs().max(1e-3),
                "cell {c}: {got} vs {want}"
            );
        }
    }
}
