use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};

use super::face_laplace::fine_faces_by_component;
use super::*;
use crate::decomp::{classify_interface, partition_structured};
use crate::mesh::generate_cubic_mesh;
use crate::vem3d::{assemble, build_all_face_projectors, RhoField};

fn setup(n: usize, m: usize) -> (crate::mesh::PolyMesh3D, crate::decomp::Partition, InterfaceClassification, GlobalSystem, Vec<crate::vem3d::FaceProjector>) {
    let mesh = generate_cubic_mesh(n);
    let partition = partition_structured(&mesh, m).unwrap();
    let classification = classify_interface(&mesh, &partition).unwrap();
    let system = assemble(&mesh, &RhoField::Constant(1.0), &|_| 1.0).unwrap();
    let fps = build_all_face_projectors(&mesh).unwrap();
    (mesh, partition, classification, system, fps)
}

#[test]
fn edge_values_linear_rule() {
    // Straight edge along x from x0=(0,0,0) to x1=(1,0,0) with nodes at
    // quarter points.
    let positions = vec![
        Point3::new(0.0, 0.0, 0.0),
        Point3::new(0.25, 0.0, 0.0),
        Point3::new(0.5, 0.0, 0.0),
        Point3::new(0.75, 0.0, 0.0),
        Point3::new(1.0, 0.0, 0.0),
    ];
    let edge = EdgeComponent {
        sigma: vec![0, 1, 2],
        nodes: vec![1, 2, 3],
        endpoints: vec![0, 4],
        touches_boundary: false,
    };
    let vals = edge_coarse_values(&positions, &edge, 0).unwrap();
    assert_eq!(vals, vec![0.75, 0.5, 0.25]);
    let vals_other = edge_coarse_values(&positions, &edge, 4).unwrap();
    assert_eq!(vals_other, vec![0.25, 0.5, 0.75]);
}

#[test]
fn edge_values_zigzag_chord() {
    // Staircase edge from (0,0,0) to (1,0,0); a node at (0.75, h, 0) projects
    // to t = 0.75 on the chord, value 0.25.
    let h = 0.05;
    let positions = vec![
        Point3::new(0.0, 0.0, 0.0),
        Point3::new(0.75, h, 0.0),
        Point3::new(1.0, 0.0, 0.0),
    ];
    let edge = EdgeComponent {
        sigma: vec![0, 1, 2],
        nodes: vec![1],
        endpoints: vec![0, 2],
        touches_boundary: false,
    };
    let vals = edge_coarse_values(&positions, &edge, 0).unwrap();
    assert!((vals[0] - 0.25).abs() < 1e-14);
}

#[test]
fn edge_values_reject_coincident_endpoints() {
    let positions = vec![Point3::new(0.3, 0.0, 0.0), Point3::new(0.3, 0.0, 0.0), Point3::new(0.5, 0.1, 0.0)];
    let edge = EdgeComponent {
        sigma: vec![0, 1, 2],
        nodes: vec![2],
        endpoints: vec![0, 1],
        touches_boundary: false,
    };
    assert!(matches!(
        edge_coarse_values(&positions, &edge, 0),
        Err(CoarseError::DegenerateEdge { .. })
    ));
}

#[test]
fn face_solve_preserves_constants_and_linears() {
    let (mesh, partition, classification, _system, fps) = setup(6, 2);
    let fine = fine_faces_by_component(&mesh, &partition, &classification);
    // Pick the largest face component (a quarter plane with 4 interior nodes).
    let (ci, comp) = classification
        .faces
        .iter()
        .enumerate()
        .max_by_key(|(_, f)| f.nodes.len())
        .unwrap();
    let fs = FaceSystem::build(&mesh, &classification, ci, &fine[ci], &fps).unwrap();

    // Constants are discrete-harmonic.
    let ones = vec![1.0; mesh.vertices.len()];
    let sol = fs.solve(&ones).unwrap();
    for v in &sol {
        assert!((v - 1.0).abs() < 1e-10);
    }

    // Linear data on the (planar) face is reproduced exactly: 2D patch test.
    let linear = |p: &Point3| 1.0 - 0.8 * p.y + 0.3 * p.z;
    let vals: Vec<f64> = mesh.vertices.iter().map(|p| linear(p)).collect();
    let sol = fs.solve(&vals).unwrap();
    for (&v, got) in comp.nodes.iter().zip(&sol) {
        let want = linear(&mesh.vertices[v]);
        assert!((got - want).abs() < 1e-10, "{got} vs {want}");
    }
}

#[test]
fn face_solve_matches_dense_oracle() {
    let (mesh, partition, classification, _system, fps) = setup(6, 2);
    let fine = fine_faces_by_component(&mesh, &partition, &classification);
    let (ci, comp) = classification
        .faces
        .iter()
        .enumerate()
        .max_by_key(|(_, f)| f.nodes.len())
        .unwrap();
    let fs = FaceSystem::build(&mesh, &classification, ci, &fine[ci], &fps).unwrap();

    // Dirichlet data: an arbitrary smooth function.
    let g = |p: &Point3| (3.1 * p.y).sin() + 0.5 * p.z * p.z;
    let values: Vec<f64> = mesh.vertices.iter().map(|p| g(p)).collect();
    let sol = fs.solve(&values).unwrap();

    // Oracle: assemble the same system densely over all nodes of the fine
    // faces and solve the Dirichlet-eliminated block with nalgebra.
    let mut all_nodes: Vec<usize> =
        fine[ci].iter().flat_map(|&f| mesh.faces[f].vertex_loop.iter().copied()).collect();
    all_nodes.sort_unstable();
    all_nodes.dedup();
    let loc: HashMap<usize, usize> = all_nodes.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let nn = all_nodes.len();
    let mut big: DMatrix<f64> = DMatrix::zeros(nn, nn);
    for &f in &fine[ci] {
        let loop_ = &mesh.faces[f].vertex_loop;
        let k = &fps[f].stiffness;
        for (a, &va) in loop_.iter().enumerate() {
            for (b, &vb) in loop_.iter().enumerate() {
                big[(loc[&va], loc[&vb])] += k[(a, b)];
            }
        }
    }
    let unknown_pos: Vec<usize> = comp.nodes.iter().map(|v| loc[v]).collect();
    let m = unknown_pos.len();
    let mut a_uu: DMatrix<f64> = DMatrix::zeros(m, m);
    let mut rhs: DVector<f64> = DVector::zeros(m);
    for (i, &pi) in unknown_pos.iter().enumerate() {
        for (j, &pj) in unknown_pos.iter().enumerate() {
            a_uu[(i, j)] = big[(pi, pj)];
        }
        for (v, &pv) in loc.iter() {
            if !comp.nodes.contains(v) {
                rhs[i] -= big[(pi, pv)] * g(&mesh.vertices[*v]);
            }
        }
    }
    let oracle = a_uu.lu().solve(&rhs).unwrap();
    for i in 0..m {
        assert!((sol[i] - oracle[i]).abs() < 1e-12, "{} vs {}", sol[i], oracle[i]);
    }
}

#[test]
fn harmonic_extension_constants_and_minimality() {
    // The center subdomain of a 3x3x3 box partition does not touch the domain
    // boundary, so all of its neighbors are free dofs and constants extend to
    // constants exactly.
    let (mesh, _partition, classification, system, _fps) = setup(6, 3);
    let center = 1 + 3 + 9;
    let interior: Vec<usize> = (0..mesh.vertices.len())
        .filter(|&v| classification.sigma[v] == vec![center])
        .filter_map(|v| system.dofs.free_of_vertex[v])
        .collect();
    assert_eq!(interior.len(), 1);

    // Boundary of the subdomain: free interface nodes whose sigma contains it.
    let gamma: Vec<usize> = (0..mesh.vertices.len())
        .filter(|&v| {
            classification.sigma[v].len() >= 2 && classification.sigma[v].contains(&center)
        })
        .filter_map(|v| system.dofs.free_of_vertex[v])
        .collect();

    // Constant data extends to the constant.
    let data: HashMap<usize, f64> = gamma.iter().map(|&fi| (fi, 3.25)).collect();
    let ext = harmonic_interior_extension(&system, &interior, &data).unwrap();
    assert!((ext[0] - 3.25).abs() < 1e-10, "constant extension gave {}", ext[0]);

    // Energy minimality against the zero-interior extension.
    let data: HashMap<usize, f64> =
        gamma.iter().enumerate().map(|(k, &fi)| (fi, (k as f64 * 0.37).sin())).collect();
    let ext = harmonic_interior_extension(&system, &interior, &data).unwrap();
    let energy = |interior_val: f64| -> f64 {
        let mut x = vec![0.0; system.n_free()];
        for (&fi, &val) in &data {
            x[fi] = val;
        }
        x[interior[0]] = interior_val;
        let mut ax = vec![0.0; system.n_free()];
        system.a.matvec(&x, &mut ax);
        x.iter().zip(&ax).map(|(a, b)| a * b).sum()
    };
    assert!(energy(ext[0]) <= energy(0.0) + 1e-12);
}

#[test]
fn harmonic_extension_matches_dense_oracle() {
    let (mesh, _partition, classification, system, _fps) = setup(6, 2);
    // Subdomain 0: 3x3x3 cells, 2x2x2 = 8 interior free nodes.
    let interior: Vec<usize> = (0..mesh.vertices.len())
        .filter(|&v| classification.sigma[v] == vec![0])
        .filter_map(|v| system.dofs.free_of_vertex[v])
        .collect();
    assert_eq!(interior.len(), 8);
    let gamma: Vec<usize> = (0..mesh.vertices.len())
        .filter(|&v| classification.sigma[v].len() >= 2 && classification.sigma[v].contains(&0))
        .filter_map(|v| system.dofs.free_of_vertex[v])
        .collect();
    let data: HashMap<usize, f64> =
        gamma.iter().enumerate().map(|(k, &fi)| (fi, crate::rng::symmetric(8, k as u64))).collect();
    let ext = harmonic_interior_extension(&system, &interior, &data).unwrap();

    let m = interior.len();
    let mut a_ii: DMatrix<f64> = DMatrix::zeros(m, m);
    let mut rhs: DVector<f64> = DVector::zeros(m);
    for (i, &fi) in interior.iter().enumerate() {
        for (j, &fj) in interior.iter().enumerate() {
            a_ii[(i, j)] = system.a.get(fi, fj);
        }
        for (&fg, &val) in &data {
            rhs[i] -= system.a.get(fi, fg) * val;
        }
    }
    let oracle = a_ii.lu().solve(&rhs).unwrap();
    for i in 0..m {
        assert!((ext[i] - oracle[i]).abs() < 1e-11, "{} vs {}", ext[i], oracle[i]);
    }
}

#[test]
fn single_vertex_column_on_two_by_two_boxes() {
    let (mesh, partition, classification, system, fps) = setup(8, 2);
    let basis = build_coarse_basis(&mesh, &system, &classification, &partition, &fps).unwrap();
    assert_eq!(basis.len(), 1);
    let center = classification.vertices[0];
    let col = &basis.columns()[0];

    // Delta at the coarse vertex.
    let center_free = system.dofs.free_of_vertex[center].unwrap();
    let at_center = col.iter().find(|&&(fi, _)| fi == center_free).unwrap().1;
    assert_eq!(at_center, 1.0);

    // All values within [0,1]; face nodes adjacent to the domain boundary are
    // strictly inside (0,1).
    let dense: HashMap<usize, f64> = col.iter().copied().collect();
    for f in &classification.faces {
        for &v in &f.nodes {
            let fi = system.dofs.free_of_vertex[v].unwrap();
            let val = dense.get(&fi).copied().unwrap_or(0.0);
            assert!((0.0..=1.0).contains(&val));
            let near_boundary =
                mesh.vertex_adjacency()[v].iter().any(|&w| mesh.boundary_vertex[w]);
            if near_boundary {
                assert!(val > 0.0 && val < 1.0, "value {val} at boundary-adjacent face node");
            }
        }
    }
}

#[test]
fn partition_of_unity_away_from_boundary() {
    let (mesh, partition, classification, system, fps) = setup(6, 3);
    let basis = build_coarse_basis(&mesh, &system, &classification, &partition, &fps).unwrap();
    assert_eq!(basis.len(), 8);

    let mut sum = vec![0.0f64; system.n_free()];
    for col in basis.columns() {
        for &(fi, v) in col {
            sum[fi] += v;
        }
    }
    let mut checked = 0;
    for comp in classification.faces.iter().filter(|f| !f.touches_boundary) {
        for &v in &comp.nodes {
            let fi = system.dofs.free_of_vertex[v].unwrap();
            assert!((sum[fi] - 1.0).abs() < 1e-8, "face PoU violated: {}", sum[fi]);
            checked += 1;
        }
    }
    for comp in classification.edges.iter().filter(|e| !e.touches_boundary) {
        for &v in &comp.nodes {
            let fi = system.dofs.free_of_vertex[v].unwrap();
            assert!((sum[fi] - 1.0).abs() < 1e-8, "edge PoU violated: {}", sum[fi]);
            checked += 1;
        }
    }
    for &v in &classification.vertices {
        let fi = system.dofs.free_of_vertex[v].unwrap();
        assert!((sum[fi] - 1.0).abs() < 1e-12);
        checked += 1;
    }
    assert!(checked > 8, "expected interior components to exist");
}

#[test]
fn delta_property_across_columns() {
    let (mesh, partition, classification, system, fps) = setup(6, 3);
    let basis = build_coarse_basis(&mesh, &system, &classification, &partition, &fps).unwrap();
    for (ci, col) in basis.columns().iter().enumerate() {
        let dense: HashMap<usize, f64> = col.iter().copied().collect();
        for (vi, &vertex) in basis.vertices().iter().enumerate() {
            let fi = system.dofs.free_of_vertex[vertex].unwrap();
            let val = dense.get(&fi).copied().unwrap_or(0.0);
            let want = if ci == vi { 1.0 } else { 0.0 };
            assert_eq!(val, want, "column {ci} at vertex {vi}");
        }
    }
}

#[test]
fn basis_is_rho_invariant() {
    let mesh = generate_cubic_mesh(6);
    let partition = partition_structured(&mesh, 3).unwrap();
    let classification = classify_interface(&mesh, &partition).unwrap();
    let fps = build_all_face_projectors(&mesh).unwrap();

    let s1 = assemble(&mesh, &RhoField::Constant(1.0), &|_| 1.0).unwrap();
    let values: Vec<f64> = (0..partition.count)
        .map(|i| (1.0 + 999.0 * crate::rng::uniform(13, i as u64)).max(1.0))
        .collect();
    let s2 = assemble(
        &mesh,
        &RhoField::PerSubdomain { partition: &partition, values: &values },
        &|_| 1.0,
    )
    .unwrap();

    let b1 = build_coarse_basis(&mesh, &s1, &classification, &partition, &fps).unwrap();
    let b2 = build_coarse_basis(&mesh, &s2, &classification, &partition, &fps).unwrap();
    for (c1, c2) in b1.columns().iter().zip(b2.columns()) {
        assert_eq!(c1.len(), c2.len());
        for (&(i1, v1), &(i2, v2)) in c1.iter().zip(c2) {
            assert_eq!(i1, i2);
            assert!((v1 - v2).abs() < 1e-10, "{v1} vs {v2}");
        }
    }
}

#[test]
fn column_support_is_local() {
    let (mesh, partition, classification, system, fps) = setup(6, 3);
    let basis = build_coarse_basis(&mesh, &system, &classification, &partition, &fps).unwrap();
    for (ci, col) in basis.columns().iter().enumerate() {
        let v = basis.vertices()[ci];
        let sigma_v = &classification.sigma[v];
        for &(fi, val) in col {
            if val == 0.0 {
                continue;
            }
            let w = system.dofs.vertex_of_free[fi];
            let sigma_w = &classification.sigma[w];
            assert!(
                sigma_w.iter().any(|s| sigma_v.contains(s)),
                "column {ci} reaches node {w} outside its subdomain closure"
            );
        }
    }
}
