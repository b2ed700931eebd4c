//! Configuration-driven experiment runner: mesh/partition/overlap sweeps with
//! PCG iteration counts and condition estimates, CSV output and VTK export.

mod config;
mod runner;
mod vtk;

pub use config::{ExperimentConfig, MeshSpec, PartitionSpec, RhoMode, SweepKind, SweepSpec};
pub use runner::{run_experiment, sample_rho, write_csv, ExperimentReport, ResultRow};
pub use vtk::export_vtk;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Mesh(#[from] crate::mesh::MeshError),
    #[error(transparent)]
    Vem(#[from] crate::vem3d::VemError),
    #[error(transparent)]
    Decomp(#[from] crate::decomp::DecompError),
    #[error(transparent)]
    Coarse(#[from] crate::coarse::CoarseError),
    #[error(transparent)]
    Solver(#[from] crate::schwarz::SolverError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
