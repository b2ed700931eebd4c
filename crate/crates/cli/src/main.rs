//! Command-line driver: builds a mesh, decomposes it, assembles the virtual
//! element system and solves it with two-level Schwarz PCG, sweeping one
//! parameter if requested.
//!
//! Exit codes: 0 full success, 2 partial row failures, 1 fatal error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use vemdd::harness::{run_experiment, ExperimentConfig};

#[derive(Parser)]
#[command(name = "vemdd", version, about = "Polyhedral VEM with two-level Schwarz PCG")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a solve or a parameter sweep.
    Solve(SolveArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Flat key=value config file; command-line flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Mesh family: cubes | voronoi | hexprism | file:PATH
    #[arg(long)]
    mesh: Option<String>,
    /// Fine resolution (cells per direction; hex columns for prisms).
    #[arg(long)]
    n: Option<usize>,
    /// Voronoi jitter in [0, 0.5).
    #[arg(long)]
    jitter: Option<f64>,
    /// Partition: structured:M | graph:N | file:PATH
    #[arg(long)]
    partition: Option<String>,
    /// Overlap layers.
    #[arg(long)]
    layers: Option<usize>,
    /// Coefficient mode: one | disc
    #[arg(long)]
    rho: Option<String>,
    #[arg(long = "rho-max")]
    rho_max: Option<f64>,
    #[arg(long = "rho-min")]
    rho_min: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// PCG relative residual tolerance.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long = "max-iter")]
    max_iter: Option<usize>,
    /// Sweep: none | N:v1,v2,.. | Hdelta:v1,.. | Hh:v1,..
    #[arg(long)]
    sweep: Option<String>,
    /// Write results to this CSV file.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Write mesh + fields to VTK files with this path prefix.
    #[arg(long)]
    vtk: Option<PathBuf>,
    /// Zero the wall-time columns for byte-reproducible output.
    #[arg(long = "no-timings", default_value_t = false)]
    no_timings: bool,
}

fn build_config(args: &SolveArgs) -> Result<ExperimentConfig, String> {
    let mut cfg = ExperimentConfig::default();
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        cfg.apply_file(&text).map_err(|e| e.to_string())?;
    }
    let mut set = |key: &str, value: Option<String>| -> Result<(), String> {
        if let Some(v) = value {
            cfg.set(key, &v).map_err(|e| e.to_string())?;
        }
        Ok(())
    };
    set("mesh", args.mesh.clone())?;
    set("n", args.n.map(|v| v.to_string()))?;
    set("jitter", args.jitter.map(|v| v.to_string()))?;
    set("partition", args.partition.clone())?;
    set("layers", args.layers.map(|v| v.to_string()))?;
    set("rho", args.rho.clone())?;
    set("rho-max", args.rho_max.map(|v| v.to_string()))?;
    set("rho-min", args.rho_min.map(|v| v.to_string()))?;
    set("seed", args.seed.map(|v| v.to_string()))?;
    set("tol", args.tol.map(|v| v.to_string()))?;
    set("max-iter", args.max_iter.map(|v| v.to_string()))?;
    set("sweep", args.sweep.clone())?;
    set("csv", args.csv.as_ref().map(|p| p.display().to_string()))?;
    set("vtk", args.vtk.as_ref().map(|p| p.display().to_string()))?;
    if args.no_timings {
        cfg.set("timings", "false").map_err(|e| e.to_string())?;
    }
    Ok(cfg)
}


fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match cli.command {
        Command::Solve(args) => {
            let cfg = match build_config(&args) {
                Ok(cfg) => cfg,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(1);
                }
            };
            match run_experiment(&cfg) {
                Ok(report) if report.all_ok() => ExitCode::SUCCESS,
                Ok(_) => ExitCode::from(2),
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
            }
        }
    }
}
