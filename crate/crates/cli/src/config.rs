//! Experiment configuration files.
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "experiment": "quartic_rates",
//!   "measure": { "name": "quartic", "mean": 0.0, "scale": 1.0 },
//!   "solver": { "dt": 1e-4, "t_end": 4.0, "grid_cells": 400, "particles": 2000, "pairs": 400 },
//!   "seed": 7,
//!   "output_dir": "out/quartic"
//! }
//! ```
//!
//! Only `schema_version` and `experiment` are required; everything else falls
//! back to the defaults of the experiment. Unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use wjgap_core::measures::CATALOG_NAMES;
use wjgap_core::CatalogParams;

use crate::experiments::{self, ExperimentInfo};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub experiment: String,
    #[serde(default)]
    pub measure: Option<MeasureSpec>,
    #[serde(default)]
    pub solver: SolverParams,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureSpec {
    pub name: String,
    #[serde(default)]
    pub mean: f64,
    #[serde(default = "one")]
    pub scale: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverParams {
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
    pub grid_cells: Option<usize>,
    pub particles: Option<usize>,
    pub pairs: Option<usize>,
}

/// A config rejected before any computation.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{field}: {message}")]
pub struct SchemaError {
    pub field: String,
    pub message: String,
}

impl SchemaError {
    fn new(field: &str, message: impl Into<String>) -> Self {
        Self { field: field.into(), message: message.into() }
    }
}

/// Fully resolved parameters handed to an experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct Params {
    pub measure: String,
    pub catalog: CatalogParams,
    /// `None` selects the largest stable step of the solver.
    pub dt: Option<f64>,
    pub t_end: f64,
    pub grid_cells: usize,
    pub particles: usize,
    pub pairs: usize,
    pub seed: u64,
}

/// Per-experiment defaults.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Defaults {
    pub measure: &'static str,
    pub t_end: f64,
    pub grid_cells: usize,
    pub particles: usize,
    pub pairs: usize,
}

pub fn load(path: &Path) -> Result<ExperimentConfig, SchemaError> {
    let text = std::fs::read_to_string(path).map_err(|e| SchemaError::new("config", format!("{}: {e}", path.display())))?;
    parse(&text)
}

pub fn parse(text: &str) -> Result<ExperimentConfig, SchemaError> {
    serde_json::from_str(text).map_err(|e| SchemaError::new("config", e.to_string()))
}

fn positive(field: &str, v: Option<f64>) -> Result<Option<f64>, SchemaError> {
    match v {
        Some(x) if !(x > 0.0 && x.is_finite()) => Err(SchemaError::new(field, format!("must be positive and finite, got {x}"))),
        _ => Ok(v),
    }
}

fn within(field: &str, v: Option<usize>, lo: usize, hi: usize) -> Result<Option<usize>, SchemaError> {
    match v {
        Some(n) if n < lo || n > hi => Err(SchemaError::new(field, format!("must lie in [{lo}, {hi}], got {n}"))),
        _ => Ok(v),
    }
}

impl ExperimentConfig {
    /// Checks the schema and merges defaults; `seed` overrides the file.
    pub fn resolve(&self, seed: Option<u64>) -> Result<(&'static ExperimentInfo, Params), SchemaError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(SchemaError::new(
                "schema_version",
                format!("unsupported version {}, expected {SCHEMA_VERSION}", self.schema_version),
            ));
        }
        let info = experiments::find(&self.experiment).ok_or_else(|| {
            SchemaError::new("experiment", format!("unknown experiment `{}`", self.experiment))
        })?;
        let d = info.defaults;
        let (measure, catalog) = match &self.measure {
            None => (d.measure.to_string(), CatalogParams::default()),
            Some(m) => {
                if !CATALOG_NAMES.contains(&m.name.as_str()) {
                    return Err(SchemaError::new("measure.name", format!("unknown catalog entry `{}`", m.name)));
                }
                if !info.measures.contains(&m.name.as_str()) {
                    return Err(SchemaError::new(
                        "measure.name",
                        format!("`{}` does not support `{}`; use one of {:?}", info.name, m.name, info.measures),
                    ));
                }
                if !m.mean.is_finite() {
                    return Err(SchemaError::new("measure.mean", "must be finite"));
                }
                positive("measure.scale", Some(m.scale))?;
                (m.name.clone(), CatalogParams { mean: m.mean, scale: m.scale, factors: Vec::new() })
            }
        };
        let s = &self.solver;
        let dt = positive("solver.dt", s.dt)?;
        let t_end = positive("solver.t_end", s.t_end)?.unwrap_or(d.t_end);
        if let Some(dt) = dt {
            if dt > t_end {
                return Err(SchemaError::new("solver.dt", format!("{dt} exceeds t_end {t_end}")));
            }
        }
        let params = Params {
            measure,
            catalog,
            dt,
            t_end,
            grid_cells: within("solver.grid_cells", s.grid_cells, 50, 20_000)?.unwrap_or(d.grid_cells),
            particles: within("solver.particles", s.particles, 2, 200_000)?.unwrap_or(d.particles),
            pairs: within("solver.pairs", s.pairs, 100, 1_000_000)?.unwrap_or(d.pairs),
            seed: seed.or(self.seed).unwrap_or(0),
        };
        Ok((info, params))
    }
}
