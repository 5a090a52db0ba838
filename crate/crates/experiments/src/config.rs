//! Experiment configuration, read from TOML.
//!
//! ```toml
//! r_grid = [100.0, 1000.0, 10000.0]
//! replications = 2000
//! seed = 7
//!
//! [graph]
//! kind = "complete"
//! m = 2
//! n = 2
//!
//! [rates]
//! mode = "fixed"
//! beta = 0.5
//! beta_prime = 2.0
//!
//! [dynamics]
//! kind = "slow"
//! alpha = 0.3
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use edgeflip::{BipartiteGraph, Dynamics, ModelParams, QueueParams, RateFunctions};
use serde::{Deserialize, Serialize};

use crate::error::{ExpError, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub name: Option<String>,
    pub graph: GraphSpec,
    pub rates: RateFunctions,
    #[serde(default)]
    pub queues: QueueConfig,
    pub dynamics: Dynamics,
    pub r_grid: Vec<f64>,
    pub replications: usize,
    pub seed: u64,
    #[serde(default = "yes")]
    pub deactivate_on_empty: bool,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    /// Per-replication event cap.
    #[serde(default)]
    pub max_events: Option<u64>,
    #[serde(default)]
    pub tolerances: Tolerances,
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GraphSpec {
    Complete { m: usize, n: usize },
    Edges { m: usize, n: usize, edges: Vec<(usize, usize)> },
    Random { m: usize, n: usize, p: f64, seed: u64 },
    /// JSON file holding `{"m": .., "n": .., "edges": [[u, v], ..]}`;
    /// relative paths resolve against the config file.
    File { path: PathBuf },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphFile {
    m: usize,
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl GraphSpec {
    pub fn build(&self) -> Result<BipartiteGraph> {
        let g = match self {
            GraphSpec::Complete { m, n } => BipartiteGraph::complete(*m, *n),
            GraphSpec::Edges { m, n, edges } => BipartiteGraph::from_edges(*m, *n, edges)?,
            GraphSpec::Random { m, n, p, seed } => BipartiteGraph::random(*m, *n, *p, *seed)?,
            GraphSpec::File { path } => {
                let text = fs::read_to_string(path)
                    .map_err(|e| ExpError::Config(format!("graph file {}: {e}", path.display())))?;
                let f: GraphFile = serde_json::from_str(&text)
                    .map_err(|e| ExpError::Config(format!("graph file {}: {e}", path.display())))?;
                BipartiteGraph::from_edges(f.m, f.n, &f.edges)?
            }
        };
        Ok(g)
    }

    pub fn is_complete(&self) -> bool {
        matches!(self, GraphSpec::Complete { .. })
    }
}

/// Queue parameters without `r`, which comes from the grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QueueConfig {
    pub arrival_rate: f64,
    pub mean_service_u: f64,
    pub mean_service_v: f64,
    pub drain_speed: f64,
    pub gamma_u: f64,
    pub gamma_v: f64,
}

impl Default for QueueConfig {
    fn default() -> Self {
        let q = QueueParams::default();
        Self {
            arrival_rate: q.arrival_rate,
            mean_service_u: q.mean_service_u,
            mean_service_v: q.mean_service_v,
            drain_speed: q.drain_speed,
            gamma_u: q.gamma_u,
            gamma_v: q.gamma_v,
        }
    }
}

impl QueueConfig {
    pub fn at(&self, r: f64) -> QueueParams {
        QueueParams {
            arrival_rate: self.arrival_rate,
            mean_service_u: self.mean_service_u,
            mean_service_v: self.mean_service_v,
            drain_speed: self.drain_speed,
            gamma_u: self.gamma_u,
            gamma_v: self.gamma_v,
            r,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Allowed |fitted - predicted| exponent.
    pub exponent: f64,
    /// Allowed max/min spread of mean / prediction across the grid.
    pub ratio_drift: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { exponent: 0.1, ratio_drift: 2.0 }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| ExpError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads and validates a config file.
    pub fn load(path: &Path) -> Result<Self> {
        let text =
            fs::read_to_string(path).map_err(|e| ExpError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg: Self = toml::from_str(&text).map_err(|e| ExpError::Config(format!("{}: {e}", path.display())))?;
        if let GraphSpec::File { path: graph_path } = &mut cfg.graph {
            if graph_path.is_relative() {
                if let Some(dir) = path.parent() {
                    *graph_path = dir.join(&*graph_path);
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn model_params(&self, r: f64) -> ModelParams {
        ModelParams {
            queues: self.queues.at(r),
            rates: self.rates,
            dynamics: self.dynamics,
            deactivate_on_empty: self.deactivate_on_empty,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.r_grid.is_empty() {
            return Err(ExpError::Config("r_grid is empty".into()));
        }
        if self.r_grid.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(ExpError::Config("r_grid values must be positive and finite".into()));
        }
        if self.r_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ExpError::Config("r_grid must be strictly increasing".into()));
        }
        if self.replications == 0 {
            return Err(ExpError::Config("replications must be at least 1".into()));
        }
        if self.max_events == Some(0) {
            return Err(ExpError::Config("max_events must be positive".into()));
        }
        if !(self.tolerances.exponent > 0.0 && self.tolerances.ratio_drift >= 1.0) {
            return Err(ExpError::Config("tolerances need exponent > 0 and ratio_drift >= 1".into()));
        }
        for &r in &self.r_grid {
            self.model_params(r).validate().map_err(|e| ExpError::Config(format!("at r = {r}: {e}")))?;
        }
        self.graph.build().map_err(|e| match e {
            ExpError::Model(m) => ExpError::Config(format!("graph: {m}")),
            other => other,
        })?;
        Ok(())
    }
}
