//! Mesh import/export in a plain JSON schema.
//!
//! ```json
//! { "vertices": [[x,y,z],...],
//!   "faces": [[v0,v1,...],...],
//!   "cells": [{"faces":[i,...],"signs":[1,-1,...]},...] }
//! ```
//!
//! Indices are 0-based; signs give the outward orientation per cell.
//! Coordinates are written with 17 significant digits so the round trip is
//! exact.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Deserialize;

use super::{MeshError, PolyMesh3D};
use crate::Point3;

#[derive(Deserialize)]
struct MeshFile {
    vertices: Vec<[f64; 3]>,
    faces: Vec<Vec<usize>>,
    cells: Vec<CellFile>,
}

#[derive(Deserialize)]
struct CellFile {
    faces: Vec<usize>,
    signs: Vec<i8>,
}

/// Read a mesh, rebuild connectivity-derived data and validate it.
pub fn import_mesh(path: impl AsRef<Path>) -> Result<PolyMesh3D, MeshError> {
    let text = fs::read_to_string(path)?;
    let file: MeshFile =
        serde_json::from_str(&text).map_err(|e| MeshError::Schema(e.to_string()))?;
    let vertices: Vec<Point3> = file.vertices.iter().map(|&[x, y, z]| Point3::new(x, y, z)).collect();
    let mut cells = Vec::with_capacity(file.cells.len());
    for (c, cf) in file.cells.iter().enumerate() {
        if cf.faces.len() != cf.signs.len() {
            return Err(MeshError::Schema(format!(
                "cell {c}: faces and signs have different lengths"
            )));
        }
        if cf.signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(MeshError::Schema(format!("cell {c}: signs must be +1 or -1")));
        }
        cells.push(cf.faces.iter().copied().zip(cf.signs.iter().copied()).collect());
    }
    PolyMesh3D::from_connectivity(vertices, file.faces, cells)
}

/// Write a mesh in the JSON schema (pretty-printed, keys in schema order).
pub fn export_mesh(mesh: &PolyMesh3D, path: impl AsRef<Path>) -> Result<(), MeshError> {
    let mut s = String::new();
    s.push_str("{\n  \"vertices\": [\n");
    for (i, p) in mesh.vertices.iter().enumerate() {
        let sep = if i + 1 < mesh.vertices.len() { "," } else { "" };
        writeln!(s, "    [{:.16e}, {:.16e}, {:.16e}]{sep}", p.x, p.y, p.z).unwrap();
    }
    s.push_str("  ],\n  \"faces\": [\n");
    for (i, f) in mesh.faces.iter().enumerate() {
        let sep = if i + 1 < mesh.faces.len() { "," } else { "" };
        let ids: Vec<String> = f.vertex_loop.iter().map(|v| v.to_string()).collect();
        writeln!(s, "    [{}]{sep}", ids.join(", ")).unwrap();
    }
    s.push_str("  ],\n  \"cells\": [\n");
    for (i, c) in mesh.cells.iter().enumerate() {
        let sep = if i + 1 < mesh.cells.len() { "," } else { "" };
        let faces: Vec<String> = c.face_refs.iter().map(|(f, _)| f.to_string()).collect();
        let signs: Vec<String> = c.face_refs.iter().map(|(_, s)| s.to_string()).collect();
        writeln!(
            s,
            "    {{\"faces\": [{}], \"signs\": [{}]}}{sep}",
            faces.join(", "),
            signs.join(", ")
        )
        .unwrap();
    }
    s.push_str("  ]\n}\n");
    fs::write(path, s)?;
    Ok(())
}
