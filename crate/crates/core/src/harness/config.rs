//! Experiment configuration: parsing, validation and sweep arithmetic.
//!
//! For structured cube configurations the parameterization is exact:
//! `H/h = n/m` and `H/delta = (n/m)/layers`; sweeps rederive `n`, `m` and
//! `layers` from the varied quantity and reject non-integer combinations at
//! parse time.

use std::path::PathBuf;

use super::HarnessError;

#[derive(Debug, Clone, PartialEq)]
pub enum MeshSpec {
    Cubes,
    Voronoi { jitter: f64 },
    HexPrism,
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub enum PartitionSpec {
    Structured(usize),
    Graph(usize),
    File(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RhoMode {
    One,
    Discontinuous,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    SubdomainCount,
    OverlapRatio,
    Resolution,
}

impl SweepKind {
    pub fn label(&self) -> &'static str {
        match self {
            SweepKind::SubdomainCount => "N",
            SweepKind::OverlapRatio => "Hdelta",
            SweepKind::Resolution => "Hh",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SweepSpec {
    None,
    Values(SweepKind, Vec<usize>),
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub mesh: MeshSpec,
    /// Fine resolution parameter (cells per direction for cubes/Voronoi,
    /// hex columns for prisms; layers default to `n` there).
    pub n: usize,
    pub partition: PartitionSpec,
    pub layers: usize,
    pub rho_mode: RhoMode,
    pub rho_min: f64,
    pub rho_max: f64,
    pub seed: u64,
    pub tol: f64,
    pub max_iter: usize,
    pub sweep: SweepSpec,
    pub csv_path: Option<PathBuf>,
    pub vtk_path: Option<PathBuf>,
    /// When false, wall-time columns are written as zero so output is
    /// byte-reproducible.
    pub timings: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            mesh: MeshSpec::Cubes,
            n: 8,
            partition: PartitionSpec::Structured(2),
            layers: 1,
            rho_mode: RhoMode::One,
            rho_min: 1.0,
            rho_max: 1e3,
            seed: 1,
            tol: 1e-6,
            max_iter: 500,
            sweep: SweepSpec::None,
            csv_path: None,
            vtk_path: None,
            timings: true,
        }
    }
}

/// One resolved sweep point.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub label: String,
    pub value: f64,
    pub n: usize,
    pub partition: PartitionSpec,
    pub layers: usize,
}

impl ExperimentConfig {
    /// Apply one `key=value` pair (config file key or CLI flag name).
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), HarnessError> {
        let bad = |what: &str| HarnessError::Config(format!("invalid {what}: {value}"));
        match key {
            "mesh" => {
                self.mesh = match value {
                    "cubes" => MeshSpec::Cubes,
                    "voronoi" => MeshSpec::Voronoi { jitter: 0.3 },
                    "hexprism" => MeshSpec::HexPrism,
                    v if v.starts_with("file:") => MeshSpec::File(PathBuf::from(&v[5..])),
                    _ => return Err(bad("mesh")),
                }
            }
            "jitter" => {
                let j: f64 = value.parse().map_err(|_| bad("jitter"))?;
                if !(0.0..0.5).contains(&j) {
                    return Err(bad("jitter"));
                }
                self.mesh = MeshSpec::Voronoi { jitter: j };
            }
            "n" => self.n = value.parse().map_err(|_| bad("n"))?,
            "partition" => {
                self.partition = if let Some(m) = value.strip_prefix("structured:") {
                    PartitionSpec::Structured(m.parse().map_err(|_| bad("partition"))?)
                } else if let Some(n) = value.strip_prefix("graph:") {
                    PartitionSpec::Graph(n.parse().map_err(|_| bad("partition"))?)
                } else if let Some(p) = value.strip_prefix("file:") {
                    PartitionSpec::File(PathBuf::from(p))
                } else {
                    return Err(bad("partition"));
                }
            }
            "layers" => self.layers = value.parse().map_err(|_| bad("layers"))?,
            "rho" => {
                self.rho_mode = match value {
                    "one" => RhoMode::One,
                    "disc" => RhoMode::Discontinuous,
                    _ => return Err(bad("rho")),
                }
            }
            "rho-max" => self.rho_max = value.parse().map_err(|_| bad("rho-max"))?,
            "rho-min" => self.rho_min = value.parse().map_err(|_| bad("rho-min"))?,
            "seed" => self.seed = value.parse().map_err(|_| bad("seed"))?,
            "tol" => self.tol = value.parse().map_err(|_| bad("tol"))?,
            "max-iter" => self.max_iter = value.parse().map_err(|_| bad("max-iter"))?,
            "sweep" => self.sweep = parse_sweep(value)?,
            "csv" => self.csv_path = Some(PathBuf::from(value)),
            "vtk" => self.vtk_path = Some(PathBuf::from(value)),
            "timings" => {
                self.timings = match value {
                    "true" | "on" => true,
                    "false" | "off" => false,
                    _ => return Err(bad("timings")),
                }
            }
            _ => return Err(HarnessError::Config(format!("unknown key: {key}"))),
        }
        Ok(())
    }

    /// Parse a flat `key=value` config file; `#` starts a comment.
    pub fn apply_file(&mut self, text: &str) -> Result<(), HarnessError> {
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                HarnessError::Config(format!("line {}: expected key=value", lineno + 1))
            })?;
            self.set(key.trim(), value.trim())?;
        }
        Ok(())
    }

    fn validate(&self) -> Result<(), HarnessError> {
        if self.n == 0 || self.layers == 0 {
            return Err(HarnessError::Config("n and layers must be positive".into()));
        }
        if !(self.rho_min > 0.0 && self.rho_max >= self.rho_min) {
            return Err(HarnessError::Config("rho range must satisfy 0 < min <= max".into()));
        }
        if self.tol <= 0.0 || self.tol.is_nan() {
            return Err(HarnessError::Config("tol must be positive".into()));
        }
        Ok(())
    }

    /// Resolve the sweep into concrete `(n, partition, layers)` points;
    /// integer-checked for structured cube configurations.
    pub fn sweep_points(&self) -> Result<Vec<SweepPoint>, HarnessError> {
        self.validate()?;
        let base_m = match self.partition {
            PartitionSpec::Structured(m) => Some(m),
            _ => None,
        };
        let single = |label: &str, value: f64| SweepPoint {
            label: label.to_string(),
            value,
            n: self.n,
            partition: self.partition.clone(),
            layers: self.layers,
        };
        let SweepSpec::Values(kind, ref values) = self.sweep else {
            let n_sub = match self.partition {
                PartitionSpec::Structured(m) => (m * m * m) as f64,
                PartitionSpec::Graph(n) => n as f64,
                PartitionSpec::File(_) => 0.0,
            };
            return Ok(vec![single("none", n_sub)]);
        };
        if values.is_empty() {
            return Err(HarnessError::Config("sweep has no values".into()));
        }

        let mut points = Vec::new();
        match kind {
            SweepKind::SubdomainCount => {
                for &v in values {
                    let point = match (self.mesh == MeshSpec::Cubes, base_m) {
                        (true, Some(m0)) => {
                            let hh = exact_ratio(self.n, m0, "n/m")?;
                            let m = exact_cbrt(v)?;
                            SweepPoint {
                                label: kind.label().into(),
                                value: v as f64,
                                n: m * hh,
                                partition: PartitionSpec::Structured(m),
                                layers: self.layers,
                            }
                        }
                        _ => SweepPoint {
                            label: kind.label().into(),
                            value: v as f64,
                            n: self.n,
                            partition: PartitionSpec::Graph(v),
                            layers: self.layers,
                        },
                    };
                    points.push(point);
                }
            }
            SweepKind::OverlapRatio => {
                let m0 = base_m.ok_or_else(|| {
                    HarnessError::Config("Hdelta sweep needs a structured partition".into())
                })?;
                let hh = exact_ratio(self.n, m0, "n/m")?;
                for &v in values {
                    let layers = exact_ratio(hh, v, "(n/m)/Hdelta")?;
                    points.push(SweepPoint {
                        label: kind.label().into(),
                        value: v as f64,
                        n: self.n,
                        partition: self.partition.clone(),
                        layers,
                    });
                }
            }
            SweepKind::Resolution => {
                let m0 = base_m.ok_or_else(|| {
                    HarnessError::Config("Hh sweep needs a structured partition".into())
                })?;
                let hh0 = exact_ratio(self.n, m0, "n/m")?;
                let hdelta = exact_ratio(hh0, self.layers, "(n/m)/layers")?;
                for &v in values {
                    let layers = exact_ratio(v, hdelta, "Hh/Hdelta")?;
                    points.push(SweepPoint {
                        label: kind.label().into(),
                        value: v as f64,
                        n: m0 * v,
                        partition: self.partition.clone(),
                        layers,
                    });
                }
            }
        }
        Ok(points)
    }
}

fn parse_sweep(value: &str) -> Result<SweepSpec, HarnessError> {
    if value == "none" {
        return Ok(SweepSpec::None);
    }
    let (kind, list) = value
        .split_once(':')
        .ok_or_else(|| HarnessError::Config(format!("invalid sweep: {value}")))?;
    let kind = match kind {
        "N" => SweepKind::SubdomainCount,
        "Hdelta" => SweepKind::OverlapRatio,
        "Hh" => SweepKind::Resolution,
        _ => return Err(HarnessError::Config(format!("unknown sweep kind: {kind}"))),
    };
    let values: Result<Vec<usize>, _> = list.split(',').map(|s| s.trim().parse()).collect();
    let values = values.map_err(|_| HarnessError::Config(format!("invalid sweep values: {list}")))?;
    Ok(SweepSpec::Values(kind, values))
}

fn exact_ratio(a: usize, b: usize, what: &str) -> Result<usize, HarnessError> {
    if b == 0 || !a.is_multiple_of(b) {
        return Err(HarnessError::Config(format!("{what} = {a}/{b} is not a positive integer")));
    }
    Ok(a / b)
}

fn exact_cbrt(v: usize) -> Result<usize, HarnessError> {
    let m = (v as f64).cbrt().round() as usize;
    if m * m * m != v {
        return Err(HarnessError::Config(format!("sweep value {v} is not a cube m^3")));
    }
    Ok(m)
}
