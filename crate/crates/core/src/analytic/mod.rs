//! Exact, closed-form, approximate and bounding evaluations of the average
//! version age.
//!
//! Every subset `S` of a cluster satisfies
//!
//! ```text
//! Δ_S = (λe + λc(S)·Δc + Σ_{i∈N(S)} λi(S)·Δ_{S∪{i}}) / (λc(S) + Σ_{i∈N(S)} λi(S))
//! ```
//!
//! with `Δc = m·λe/λs` at the cluster head. [`subset`] solves this over all
//! `2^k` subsets; [`ring`] and [`full`] exploit symmetry so that `Δ_S` only
//! depends on `|S|` and collapse it to an `O(k)` chain.

mod flat_ring;
mod full;
mod ring;
mod subset;

use alloc::vec::Vec;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{AgeMethod, AgeReport, ClusterLayout, RateConfig, Topology, TopologyKind};
use crate::numeric::PRODUCT_FLOOR;

pub use flat_ring::{flat_ring_age_approx, flat_ring_age_exact, flat_ring_coefficients, gaussian_riemann_sum};
pub use full::{fully_connected_age_approx, fully_connected_bounds, fully_connected_node_age_exact, AgeBracket};
pub use ring::{ring_coefficients, ring_node_age_approx, ring_node_age_closed_form, ring_node_age_exact};
pub use subset::{general_subset_age, SubsetAgeTable, MAX_SUBSET_NODES};

/// Age at every cluster head, `m·λe/λs`.
pub fn head_age(rates: &RateConfig, m: usize) -> f64 {
    m as f64 * rates.lambda_e() / rates.lambda_s()
}

/// Age of a node in a cluster without gossip: `m·λe/λs + k·λe/λc`.
pub fn disconnected_node_age(rates: &RateConfig, m: usize, k: usize) -> AgeReport {
    let head = head_age(rates, m);
    AgeReport::new(head, head + k as f64 * rates.lambda_e() / rates.lambda_c(), AgeMethod::Exact)
}

/// Age of the whole cluster, `Δc + λe/λc`: only the head updates the full set.
pub(crate) fn whole_cluster_age(rates: &RateConfig, m: usize) -> f64 {
    head_age(rates, m) + rates.lambda_e() / rates.lambda_c()
}

/// `Δ_{S_1}, …, Δ_{S_k}` for the symmetric chain of subsets `S_j` of size `j`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct ChainRecursionTrace {
    values: Vec<f64>,
    head_age: f64,
}

impl ChainRecursionTrace {
    pub(crate) fn new(values: Vec<f64>, head_age: f64) -> Self {
        debug_assert!(!values.is_empty());
        Self { values, head_age }
    }

    /// `values()[j - 1]` is `Δ_{S_j}`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `Δ_{S_1}`, the per-node age.
    pub fn node_age(&self) -> f64 {
        self.values[0]
    }

    pub fn head_age(&self) -> f64 {
        self.head_age
    }

    /// `Δ_{S_j}` for `1 ≤ j ≤ k`.
    pub fn subset_age(&self, j: usize) -> f64 {
        self.values[j - 1]
    }

    pub fn is_nonincreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] <= w[0])
    }

    pub fn report(&self) -> AgeReport {
        AgeReport::new(self.head_age, self.node_age(), AgeMethod::Exact)
    }
}

/// Decaying products `Π_{j=1..i} f(j)` for `i = 1..len`.
///
/// Storage stops at the first product below `1e-300`; later entries read as
/// zero.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct CoefficientVector {
    entries: Vec<f64>,
    len: usize,
}

impl CoefficientVector {
    pub(crate) fn products(len: usize, mut factor: impl FnMut(usize) -> f64) -> Self {
        let mut entries = Vec::new();
        let mut running = 1.0;
        for j in 1..=len {
            running *= factor(j);
            if running < PRODUCT_FLOOR {
                break;
            }
            entries.push(running);
        }
        Self { entries, len }
    }

    /// Stored (non-negligible) entries, starting at index 1.
    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Nominal length (`k - 1` or `n - 1`).
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Entry `i` (1-based); zero past the truncation point.
    pub fn get(&self, i: usize) -> f64 {
        assert!(i >= 1 && i <= self.len, "coefficient index {i} out of 1..={}", self.len);
        self.entries.get(i - 1).copied().unwrap_or(0.0)
    }

    /// The final entry, `get(len())`.
    pub fn last(&self) -> f64 {
        if self.len == 0 {
            1.0
        } else {
            self.get(self.len)
        }
    }

    pub fn sum(&self) -> f64 {
        // smallest terms first
        self.entries.iter().rev().sum()
    }
}

pub(crate) fn check_chain_args(kind: TopologyKind, rates: &RateConfig, m: usize, k: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::ZeroSize { what: "m" });
    }
    if k == 0 {
        return Err(Error::ZeroSize { what: "k" });
    }
    if k >= 2 && rates.lambda() == 0.0 {
        return Err(Error::DegenerateTopology { topology: kind });
    }
    Ok(())
}

pub(crate) fn require_pair(k: usize) -> Result<()> {
    if k < 2 {
        Err(Error::Precondition("this evaluation needs a cluster of at least 2 nodes"))
    } else {
        Ok(())
    }
}

/// Exact per-node age for a named topology with `m` clusters of size `k`.
pub fn exact_node_age(kind: TopologyKind, rates: &RateConfig, m: usize, k: usize) -> Result<AgeReport> {
    match kind {
        TopologyKind::Disconnected => {
            if m == 0 || k == 0 {
                return Err(Error::ZeroSize { what: if m == 0 { "m" } else { "k" } });
            }
            Ok(disconnected_node_age(rates, m, k))
        }
        TopologyKind::UniRing | TopologyKind::BiRing => Ok(ring_node_age_exact(rates, m, k)?.report()),
        TopologyKind::FullyConnected => Ok(fully_connected_node_age_exact(rates, m, k)?.report()),
        TopologyKind::Custom => Err(Error::Precondition("custom topologies need an explicit graph")),
    }
}

/// Exact per-node age for any layout. For custom graphs the per-node ages
/// may differ; the report carries their mean.
pub fn layout_node_age(layout: &ClusterLayout, rates: &RateConfig) -> Result<AgeReport> {
    layout.check_rates(rates)?;
    match layout.topology() {
        Topology::Custom(graph) => {
            let ages = general_subset_age(graph, rates, layout.m())?;
            let mean = ages.iter().sum::<f64>() / ages.len() as f64;
            Ok(AgeReport::new(head_age(rates, layout.m()), mean, AgeMethod::Exact))
        }
        other => exact_node_age(other.kind(), rates, layout.m(), layout.k()),
    }
}
