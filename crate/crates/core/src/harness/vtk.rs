//! Legacy ASCII VTK export with polyhedron (type 42) face-stream cells.

use std::fs;
use std::path::Path;

use super::HarnessError;
use crate::mesh::PolyMesh3D;

/// Write the mesh with named nodal scalar fields. `cell_data`, when present,
/// carries the subdomain id and coefficient per cell. Field vectors must have
/// one entry per mesh vertex (boundary dofs already filled in).
pub fn export_vtk(
    mesh: &PolyMesh3D,
    fields: &[(String, Vec<f64>)],
    cell_data: Option<(&[usize], &[f64])>,
    path: impl AsRef<Path>,
) -> Result<(), HarnessError> {
    for (name, values) in fields {
        if values.len() != mesh.vertices.len() {
            return Err(HarnessError::Config(format!(
                "field {name} has {} values for {} vertices",
                values.len(),
                mesh.vertices.len()
            )));
        }
    }

    let mut s = String::new();
    s.push_str("# vtk DataFile Version 3.0\n");
    s.push_str("polyhedral mesh\n");
    s.push_str("ASCII\n");
    s.push_str("DATASET UNSTRUCTURED_GRID\n");

    s.push_str(&format!("POINTS {} double\n", mesh.vertices.len()));
    for p in &mesh.vertices {
        s.push_str(&format!("{:.17e} {:.17e} {:.17e}\n", p.x, p.y, p.z));
    }

    // Face-stream records: n nFaces (nPts p0 p1 ...) per face; n counts the
    // integers after itself, and the CELLS size counts everything.
    let mut total = 0usize;
    let mut records: Vec<Vec<usize>> = Vec::with_capacity(mesh.cells.len());
    for cell in &mesh.cells {
        let mut rec = vec![cell.face_refs.len()];
        for &(f, _) in &cell.face_refs {
            let loop_ = &mesh.faces[f].vertex_loop;
            rec.push(loop_.len());
            rec.extend(loop_.iter().copied());
        }
        total += rec.len() + 1;
        records.push(rec);
    }
    s.push_str(&format!("CELLS {} {}\n", mesh.cells.len(), total));
    for rec in &records {
        s.push_str(&rec.len().to_string());
        for v in rec {
            s.push(' ');
            s.push_str(&v.to_string());
        }
        s.push('\n');
    }
    s.push_str(&format!("CELL_TYPES {}\n", mesh.cells.len()));
    for _ in &mesh.cells {
        s.push_str("42\n");
    }

    if let Some((subdomains, rho)) = cell_data {
        s.push_str(&format!("CELL_DATA {}\n", mesh.cells.len()));
        s.push_str("SCALARS subdomain int 1\nLOOKUP_TABLE default\n");
        for &sd in subdomains.iter().take(mesh.cells.len()) {
            s.push_str(&format!("{sd}\n"));
        }
        s.push_str("SCALARS rho double 1\nLOOKUP_TABLE default\n");
        for &sd in subdomains.iter().take(mesh.cells.len()) {
            let value = rho.get(sd).copied().unwrap_or(1.0);
            s.push_str(&format!("{value:.17e}\n"));
        }
    }

    if !fields.is_empty() {
        s.push_str(&format!("POINT_DATA {}\n", mesh.vertices.len()));
        for (name, values) in fields {
            s.push_str(&format!("SCALARS {name} double 1\nLOOKUP_TABLE default\n"));
            for v in values {
                s.push_str(&format!("{v:.17e}\n"));
            }
        }
    }

    fs::write(path, s)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::generate_cubic_mesh;

    #[test]
    fn header_counts_and_types() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("mesh.vtk");
        let mesh = generate_cubic_mesh(2);
        let zeros = vec![0.0; mesh.vertices.len()];
        export_vtk(&mesh, &[("u".into(), zeros)], None, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "# vtk DataFile Version 3.0");
        assert!(text.contains("POINTS 27 double"));
        assert!(text.contains("CELL_TYPES 8"));
        // 8 cube cells: record = 1 + (1 + 6*(1+4)) per cell = 32 ints each.
        assert!(text.contains("CELLS 8 256"));
        let type_lines = text.lines().filter(|l| *l == "42").count();
        assert_eq!(type_lines, 8);
        assert!(text.contains("POINT_DATA 27"));
        assert!(text.contains("SCALARS u double 1"));
    }

    #[test]
    fn face_stream_indices_are_in_range() {
        let mesh = crate::mesh::generate_voronoi_mesh(2, 0.3, 1).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("vor.vtk");
        export_vtk(&mesh, &[], None, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let cells_at = text.find("CELLS").unwrap();
        let types_at = text.find("CELL_TYPES").unwrap();
        for line in text[cells_at..types_at].lines().skip(1) {
            let ints: Vec<usize> = line.split_whitespace().map(|t| t.parse().unwrap()).collect();
            assert_eq!(ints[0], ints.len() - 1);
            let n_faces = ints[1];
            let mut k = 2;
            for _ in 0..n_faces {
                let np = ints[k];
                for &p in &ints[k + 1..k + 1 + np] {
                    assert!(p < mesh.vertices.len());
                }
                k += 1 + np;
            }
            assert_eq!(k, ints.len());
        }
    }
}
