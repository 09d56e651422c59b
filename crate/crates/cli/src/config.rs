//! Experiment configuration: TOML file plus command-line overrides.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Deserialize;
use surfdiff::flow2d::IterationMethod;
use surfdiff::shapes::ShapeSpec;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub shape: ShapeTable,
    /// Redundant with the shape kind; checked when present.
    pub dimension: Option<usize>,
    pub tau: Option<f64>,
    /// Coefficient `C` of the mesh-coupled rule `tau = C * h^2`.
    pub tau_rule_coefficient: Option<f64>,
    pub t_end: f64,
    pub method: Option<String>,
    pub tol: Option<f64>,
    pub max_iters: Option<usize>,
    #[serde(default)]
    pub snapshot_times: Vec<f64>,
    pub output_dir: Option<PathBuf>,
    /// Pinch-off guard threshold for surface runs (ratio of triangle
    /// orientation vectors against the initial mesh).
    pub pinch_guard_ratio: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShapeTable {
    pub kind: String,
    pub length: Option<f64>,
    pub width: Option<f64>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub n: Option<usize>,
    pub lx: Option<f64>,
    pub ly: Option<f64>,
    pub lz: Option<f64>,
    pub level: Option<usize>,
    pub radius: Option<f64>,
}

impl ShapeTable {
    pub fn to_spec(&self) -> Result<ShapeSpec> {
        let need_f = |v: Option<f64>, name: &str| {
            v.with_context(|| format!("shape kind '{}' needs '{name}'", self.kind))
        };
        let need_n = |v: Option<usize>, name: &str| {
            v.with_context(|| format!("shape kind '{}' needs '{name}'", self.kind))
        };
        Ok(match self.kind.as_str() {
            "rectangle" => ShapeSpec::Rectangle {
                length: need_f(self.length, "length")?,
                width: need_f(self.width, "width")?,
                n: need_n(self.n, "n")?,
            },
            "ellipse" => ShapeSpec::Ellipse {
                a: need_f(self.a, "a")?,
                b: need_f(self.b, "b")?,
                n: need_n(self.n, "n")?,
            },
            "flower" => ShapeSpec::Flower { n: need_n(self.n, "n")? },
            "astroid" => ShapeSpec::Astroid { n: need_n(self.n, "n")? },
            "cuboid" => ShapeSpec::Cuboid {
                lx: need_f(self.lx, "lx")?,
                ly: need_f(self.ly, "ly")?,
                lz: need_f(self.lz, "lz")?,
                level: need_n(self.level, "level")?,
            },
            "sphere" => ShapeSpec::Sphere {
                radius: need_f(self.radius, "radius")?,
                level: need_n(self.level, "level")?,
            },
            other => bail!("unknown shape kind '{other}'"),
        })
    }
}

/// Fully resolved experiment configuration.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub shape: ShapeSpec,
    pub dimension: usize,
    pub tau: f64,
    pub t_end: f64,
    pub method: IterationMethod,
    pub tol: f64,
    pub max_iters: usize,
    pub snapshot_times: Vec<f64>,
    pub output_dir: PathBuf,
    pub pinch_guard_ratio: Option<f64>,
}

/// Command-line overrides applied on top of the file.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub method: Option<String>,
    pub tau: Option<f64>,
    pub t_end: Option<f64>,
    pub snapshots: Option<Vec<f64>>,
}

pub fn parse_method(name: &str) -> Result<IterationMethod> {
    match name.to_ascii_lowercase().as_str() {
        "newton" => Ok(IterationMethod::Newton),
        "picard" => Ok(IterationMethod::Picard),
        other => bail!("unknown method '{other}' (expected 'newton' or 'picard')"),
    }
}

pub fn load_experiment(path: &Path, overrides: &Overrides) -> Result<Experiment> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    let file: ConfigFile = toml::from_str(&text)
        .with_context(|| format!("parsing config {}", path.display()))?;

    let shape = file.shape.to_spec()?;
    let dimension = shape.dimension();
    if let Some(d) = file.dimension {
        if d != dimension {
            bail!("config says dimension = {d} but shape '{:?}' is {dimension}D", file.shape.kind);
        }
    }

    let tau = match (overrides.tau, file.tau, file.tau_rule_coefficient) {
        (Some(t), _, _) => t,
        (None, Some(t), None) => t,
        (None, None, Some(c)) => {
            let h = shape.mesh_size()?;
            c * h * h
        }
        (None, Some(_), Some(_)) => {
            bail!("config sets both 'tau' and 'tau_rule_coefficient'; choose one")
        }
        (None, None, None) => bail!("config needs 'tau' or 'tau_rule_coefficient'"),
    };
    if tau <= 0.0 {
        bail!("tau must be positive, got {tau}");
    }

    let method = parse_method(
        overrides.method.as_deref().or(file.method.as_deref()).unwrap_or("newton"),
    )?;
    let t_end = overrides.t_end.unwrap_or(file.t_end);
    let snapshot_times = overrides
        .snapshots
        .clone()
        .unwrap_or_else(|| file.snapshot_times.clone());

    Ok(Experiment {
        shape,
        dimension,
        tau,
        t_end,
        method,
        tol: file.tol.unwrap_or(1e-10),
        max_iters: file.max_iters.unwrap_or(50),
        snapshot_times,
        output_dir: overrides
            .out
            .clone()
            .or(file.output_dir.clone())
            .unwrap_or_else(|| PathBuf::from("out")),
        pinch_guard_ratio: file.pinch_guard_ratio,
    })
}
