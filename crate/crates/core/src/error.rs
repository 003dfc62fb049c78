use thiserror::Error;

use crate::model::TopologyKind;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("rate `{name}` must be {requirement}, got {value}")]
    InvalidRate {
        name: &'static str,
        requirement: &'static str,
        value: f64,
    },

    #[error("layout requires n = m*k, got n={n}, m={m}, k={k}")]
    LayoutMismatch { n: usize, m: usize, k: usize },

    #[error("{what} must be at least 1")]
    ZeroSize { what: &'static str },

    #[error("custom graph has {graph} nodes but the cluster size is {k}")]
    GraphSizeMismatch { graph: usize, k: usize },

    #[error("invalid cluster graph: {0}")]
    InvalidGraph(&'static str),

    #[error("{topology} topology with k=1 has no neighbor to receive gossip rate {lambda}")]
    NoNeighbor { topology: TopologyKind, lambda: f64 },

    #[error("degenerate topology: gossip rate lambda = 0 is only allowed with the disconnected topology, got {topology}")]
    DegenerateTopology { topology: TopologyKind },

    #[error("subset recursion over k={k} nodes needs a 2^k table; k must be at most {max}")]
    SubsetTooLarge { k: usize, max: usize },

    #[error("precondition violated: {0}")]
    Precondition(&'static str),

    #[error("scaling fit needs {0}")]
    InsufficientSamples(&'static str),

    #[error("scaling fit needs positive finite samples, got ({x}, {y})")]
    NonPositiveSample { x: f64, y: f64 },

    #[error("invalid simulation config: {0}")]
    InvalidSimConfig(&'static str),

    #[error("horizon {horizon} with warmup fraction {warmup_fraction} leaves no measurement window")]
    WarmupTooShort { horizon: f64, warmup_fraction: f64 },
}

impl Error {
    /// True for errors caused by an invalid configuration, as opposed to a
    /// numerical precondition of one particular evaluation.
    pub fn is_config_error(&self) -> bool {
        !matches!(
            self,
            Error::SubsetTooLarge { .. }
                | Error::Precondition(_)
                | Error::InsufficientSamples(_)
                | Error::NonPositiveSample { .. }
        )
    }
}
