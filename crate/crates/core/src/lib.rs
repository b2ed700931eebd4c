//! Virtual element discretization of the variable-coefficient Poisson problem on
//! general polyhedral meshes, solved with a two-level overlapping additive Schwarz
//! preconditioner whose coarse space is spanned by subdomain-vertex functions.
//!
//! The crate is organized in layers:
//!
//! - [`mesh`]: polyhedral mesh data model, generators (cubes, Voronoi, hexagonal
//!   prisms) and JSON import/export;
//! - [`vem3d`]: lowest-order 3D virtual element projectors, stabilized local
//!   stiffness matrices and global assembly with Dirichlet elimination;
//! - [`decomp`]: subdomain partitions, overlap growth and the classification of
//!   interface nodes into subdomain faces, edges and vertices;
//! - [`coarse`]: construction of the vertex-based coarse space (edge rule, face
//!   Laplace solves, discrete harmonic interior extension);
//! - [`schwarz`]: sparse SPD Cholesky, the additive Schwarz preconditioner, PCG
//!   and the Lanczos condition-number estimate;
//! - [`harness`]: configuration-driven experiment runner with CSV and VTK output.

pub mod coarse;
pub mod decomp;
pub mod harness;
pub mod mesh;
pub mod schwarz;
pub mod vem3d;

mod rng;

pub use mesh::{PolyCell, PolyFace, PolyMesh3D};
pub use vem3d::GlobalSystem;

/// 3D point in space.
pub type Point3 = nalgebra::Point3<f64>;
/// 3D vector.
pub type Vector3 = nalgebra::Vector3<f64>;
