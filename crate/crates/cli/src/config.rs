//! JSON experiment configuration.
//!
//! ```json
//! {
//!   "n": 120, "m": 4, "k": 30, "topology": "biring",
//!   "lambda_e": 1.0, "lambda_s": 1.0, "lambda_c": 1.0, "lambda": 1.0,
//!   "custom_graph": [[0, 1], [1, 0]],
//!   "horizon": 100000, "replications": 20, "warmup_fraction": 0.1, "seed": 7
//! }
//! ```
//!
//! Of `n`, `m`, `k` any two determine the third. `custom_graph` is required
//! for `"topology": "custom"` and rejected otherwise. The simulation fields
//! are optional.

use std::fs;
use std::path::Path;

use gossip_age::model::{ClusterGraph, ClusterLayout, RateConfig, Topology, TopologyKind};
use gossip_age::sim::SimConfig;
use gossip_age::Error as ModelError;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub m: Option<usize>,
    #[serde(default)]
    pub k: Option<usize>,
    pub topology: TopologyKind,
    pub lambda_e: f64,
    pub lambda_s: f64,
    pub lambda_c: f64,
    pub lambda: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub custom_graph: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replications: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warmup_fraction: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

fn field(field: &'static str, message: impl Into<String>) -> CliError {
    CliError::Field {
        field,
        message: message.into(),
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Json(source) => CliError::Parse {
                path: path.to_path_buf(),
                source,
            },
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn rates(&self) -> Result<RateConfig> {
        RateConfig::new(self.lambda_e, self.lambda_s, self.lambda_c, self.lambda).map_err(|e| match e {
            ModelError::InvalidRate { name, requirement, value } => {
                field(name, format!("must be {requirement}, got {value}"))
            }
            other => other.into(),
        })
    }

    /// Resolves `(n, m, k)` from whichever two or three are given.
    pub fn sizes(&self) -> Result<(usize, usize, usize)> {
        let nonzero = |name: &'static str, v: Option<usize>| match v {
            Some(0) => Err(field(name, "must be at least 1")),
            other => Ok(other),
        };
        let (n, m, k) = (nonzero("n", self.n)?, nonzero("m", self.m)?, nonzero("k", self.k)?);
        match (n, m, k) {
            (Some(n), Some(m), Some(k)) => {
                if m.checked_mul(k) != Some(n) {
                    return Err(field("n", format!("must equal m*k = {m}*{k}, got {n}")));
                }
                Ok((n, m, k))
            }
            (Some(n), Some(m), None) if n % m == 0 => Ok((n, m, n / m)),
            (Some(n), None, Some(k)) if n % k == 0 => Ok((n, n / k, k)),
            (Some(n), Some(m), None) => Err(field("m", format!("must divide n = {n}, got {m}"))),
            (Some(n), None, Some(k)) => Err(field("k", format!("must divide n = {n}, got {k}"))),
            (None, Some(m), Some(k)) => Ok((m * k, m, k)),
            _ => Err(field("k", "at least two of n, m, k are required")),
        }
    }

    pub fn topology(&self) -> Result<Topology> {
        match (self.topology, &self.custom_graph) {
            (TopologyKind::Custom, Some(rows)) => {
                let graph = ClusterGraph::from_rows(rows).map_err(|e| field("custom_graph", e.to_string()))?;
                Ok(Topology::Custom(graph))
            }
            (TopologyKind::Custom, None) => Err(field("custom_graph", "required for the custom topology")),
            (_, Some(_)) => Err(field("custom_graph", "only allowed with \"topology\": \"custom\"")),
            (kind, None) => Ok(Topology::named(kind).expect("named topology")),
        }
    }

    pub fn layout(&self) -> Result<ClusterLayout> {
        let (n, m, k) = self.sizes()?;
        let layout = ClusterLayout::new(n, m, k, self.topology()?).map_err(|e| match e {
            ModelError::GraphSizeMismatch { .. } => field("custom_graph", e.to_string()),
            other => other.into(),
        })?;
        layout.check_rates(&self.rates()?).map_err(|e| field("lambda", e.to_string()))?;
        Ok(layout)
    }

    /// Simulation settings, with config values overriding the defaults.
    pub fn sim_config(&self) -> Result<SimConfig> {
        let mut sim = SimConfig::new(self.layout()?, self.rates()?);
        if let Some(h) = self.horizon {
            sim.horizon = h;
        }
        if let Some(r) = self.replications {
            sim.replications = r;
        }
        if let Some(w) = self.warmup_fraction {
            sim.warmup_fraction = w;
        }
        if let Some(s) = self.seed {
            sim.seed = s;
        }
        Ok(sim)
    }
}
