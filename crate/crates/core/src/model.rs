//! Rates, cluster layouts, intra-cluster topologies and evaluated ages.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The four Poisson rates of the system.
///
/// * `lambda_e`: the source produces a new version.
/// * `lambda_s`: total source to cluster-head injection, split evenly over
///   the `m` heads.
/// * `lambda_c`: total head to cluster injection, split evenly over the `k`
///   nodes of the cluster.
/// * `lambda`: per-node gossip budget, split evenly over its neighbors.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct RateConfig {
    lambda_e: f64,
    lambda_s: f64,
    lambda_c: f64,
    lambda: f64,
}

impl RateConfig {
    pub fn new(lambda_e: f64, lambda_s: f64, lambda_c: f64, lambda: f64) -> Result<Self> {
        positive("lambda_e", lambda_e)?;
        positive("lambda_s", lambda_s)?;
        positive("lambda_c", lambda_c)?;
        non_negative("lambda", lambda)?;
        Ok(Self {
            lambda_e,
            lambda_s,
            lambda_c,
            lambda,
        })
    }

    /// All four rates equal to one.
    pub fn unit() -> Self {
        Self {
            lambda_e: 1.0,
            lambda_s: 1.0,
            lambda_c: 1.0,
            lambda: 1.0,
        }
    }

    pub fn lambda_e(&self) -> f64 {
        self.lambda_e
    }

    pub fn lambda_s(&self) -> f64 {
        self.lambda_s
    }

    pub fn lambda_c(&self) -> f64 {
        self.lambda_c
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Multiplies every rate by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.lambda_e * factor,
            self.lambda_s * factor,
            self.lambda_c * factor,
            self.lambda * factor,
        )
    }

    pub fn with_lambda_s(&self, lambda_s: f64) -> Result<Self> {
        Self::new(self.lambda_e, lambda_s, self.lambda_c, self.lambda)
    }

    pub fn with_lambda_c(&self, lambda_c: f64) -> Result<Self> {
        Self::new(self.lambda_e, self.lambda_s, lambda_c, self.lambda)
    }

    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Self::new(self.lambda_e, self.lambda_s, self.lambda_c, lambda)
    }
}

fn positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidRate {
            name,
            requirement: "finite and positive",
            value,
        })
    }
}

fn non_negative(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidRate {
            name,
            requirement: "finite and non-negative",
            value,
        })
    }
}

/// Topology selector without payload.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum TopologyKind {
    Disconnected,
    #[cfg_attr(feature = "serde", serde(alias = "uni-ring", alias = "uni_ring"))]
    UniRing,
    #[cfg_attr(feature = "serde", serde(alias = "bi-ring", alias = "bi_ring", alias = "ring"))]
    BiRing,
    #[cfg_attr(
        feature = "serde",
        serde(rename = "full", alias = "fully_connected", alias = "fullyconnected", alias = "complete")
    )]
    FullyConnected,
    Custom,
}

impl TopologyKind {
    pub const NAMED: [TopologyKind; 4] = [
        TopologyKind::Disconnected,
        TopologyKind::UniRing,
        TopologyKind::BiRing,
        TopologyKind::FullyConnected,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TopologyKind::Disconnected => "disconnected",
            TopologyKind::UniRing => "uniring",
            TopologyKind::BiRing => "biring",
            TopologyKind::FullyConnected => "full",
            TopologyKind::Custom => "custom",
        }
    }

    pub fn is_ring(self) -> bool {
        matches!(self, TopologyKind::UniRing | TopologyKind::BiRing)
    }
}

impl fmt::Display for TopologyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Intra-cluster topology. `Custom` carries absolute gossip rates and
/// ignores `RateConfig::lambda`.
#[derive(Debug, Clone, PartialEq)]
pub enum Topology {
    Disconnected,
    UniRing,
    BiRing,
    FullyConnected,
    Custom(ClusterGraph),
}

impl Topology {
    pub fn kind(&self) -> TopologyKind {
        match self {
            Topology::Disconnected => TopologyKind::Disconnected,
            Topology::UniRing => TopologyKind::UniRing,
            Topology::BiRing => TopologyKind::BiRing,
            Topology::FullyConnected => TopologyKind::FullyConnected,
            Topology::Custom(_) => TopologyKind::Custom,
        }
    }
}

impl Topology {
    /// The payload-free topology for a named kind; `None` for `Custom`.
    pub fn named(kind: TopologyKind) -> Option<Topology> {
        match kind {
            TopologyKind::Disconnected => Some(Topology::Disconnected),
            TopologyKind::UniRing => Some(Topology::UniRing),
            TopologyKind::BiRing => Some(Topology::BiRing),
            TopologyKind::FullyConnected => Some(Topology::FullyConnected),
            TopologyKind::Custom => None,
        }
    }
}

/// Directed gossip rates inside one cluster. Entry `(i, j)` is the rate at
/// which node `i` pushes its version to node `j`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct ClusterGraph {
    size: usize,
    rates: Vec<f64>,
}

impl ClusterGraph {
    /// Builds a graph from a row-major `size × size` rate matrix.
    pub fn new(size: usize, rates: Vec<f64>) -> Result<Self> {
        if size == 0 {
            return Err(Error::ZeroSize { what: "graph size" });
        }
        if rates.len() != size * size {
            return Err(Error::InvalidGraph("rate matrix must be square"));
        }
        if rates.iter().any(|r| !r.is_finite() || *r < 0.0) {
            return Err(Error::InvalidGraph("rates must be finite and non-negative"));
        }
        if (0..size).any(|i| rates[i * size + i] != 0.0) {
            return Err(Error::InvalidGraph("diagonal must be zero (no self-updates)"));
        }
        Ok(Self { size, rates })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let size = rows.len();
        let mut rates = Vec::with_capacity(size * size);
        for row in rows {
            let row = row.as_ref();
            if row.len() != size {
                return Err(Error::InvalidGraph("rate matrix must be square"));
            }
            rates.extend_from_slice(row);
        }
        Self::new(size, rates)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn rate(&self, from: usize, to: usize) -> f64 {
        self.rates[from * self.size + to]
    }

    pub fn row(&self, from: usize) -> &[f64] {
        &self.rates[from * self.size..(from + 1) * self.size]
    }

    /// Total outgoing gossip rate of node `from`.
    pub fn row_sum(&self, from: usize) -> f64 {
        self.row(from).iter().sum()
    }

    pub fn total_rate(&self) -> f64 {
        self.rates.iter().sum()
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.size).all(|i| (0..i).all(|j| self.rate(i, j) == self.rate(j, i)))
    }

    pub fn nonzero_count(&self) -> usize {
        self.rates.iter().filter(|r| **r > 0.0).count()
    }

    /// `λ_i(S)`: total rate at which node `from` updates the nodes of `set`
    /// (bit `j` set means node `j` is in the set). Zero when `from ∈ set`.
    pub fn rate_into(&self, from: usize, set: u64) -> f64 {
        debug_assert!(self.size <= 64);
        if set & (1 << from) != 0 {
            return 0.0;
        }
        let row = self.row(from);
        let mut total = 0.0;
        let mut rest = set;
        while rest != 0 {
            let j = rest.trailing_zeros() as usize;
            total += row[j];
            rest &= rest - 1;
        }
        total
    }

    /// `N(S)`: nodes outside `set` with positive rate into it, as a bitmask.
    pub fn updating_neighbors(&self, set: u64) -> u64 {
        (0..self.size)
            .filter(|&i| self.rate_into(i, set) > 0.0)
            .fold(0, |acc, i| acc | (1 << i))
    }
}

/// Generates the gossip graph of a named topology with per-node budget
/// `lambda`. Nodes are labelled `0..k` and ring neighbors are `(i ± 1) mod k`.
pub fn build_topology(kind: TopologyKind, k: usize, lambda: f64) -> Result<ClusterGraph> {
    if k == 0 {
        return Err(Error::ZeroSize { what: "cluster size k" });
    }
    non_negative("lambda", lambda)?;
    let mut rates = vec![0.0; k * k];
    if kind == TopologyKind::Custom {
        return Err(Error::Precondition("custom graphs are supplied explicitly, not generated"));
    }
    if kind != TopologyKind::Disconnected {
        if lambda == 0.0 {
            return Err(Error::DegenerateTopology { topology: kind });
        }
        if k == 1 {
            return Err(Error::NoNeighbor { topology: kind, lambda });
        }
    }
    match kind {
        TopologyKind::Disconnected | TopologyKind::Custom => {}
        TopologyKind::UniRing => {
            for i in 0..k {
                rates[i * k + (i + 1) % k] = lambda;
            }
        }
        TopologyKind::BiRing => {
            let half = lambda / 2.0;
            for i in 0..k {
                rates[i * k + (i + 1) % k] += half;
                rates[i * k + (i + k - 1) % k] += half;
            }
        }
        TopologyKind::FullyConnected => {
            let each = lambda / (k - 1) as f64;
            for i in 0..k {
                for j in 0..k {
                    if i != j {
                        rates[i * k + j] = each;
                    }
                }
            }
        }
    }
    ClusterGraph::new(k, rates)
}

/// `n = m·k` nodes in `m` clusters of `k`, with one intra-cluster topology.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterLayout {
    n: usize,
    m: usize,
    k: usize,
    topology: Topology,
}

impl ClusterLayout {
    pub fn new(n: usize, m: usize, k: usize, topology: Topology) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroSize { what: "n" });
        }
        if m == 0 {
            return Err(Error::ZeroSize { what: "m" });
        }
        if k == 0 {
            return Err(Error::ZeroSize { what: "k" });
        }
        if m.checked_mul(k) != Some(n) {
            return Err(Error::LayoutMismatch { n, m, k });
        }
        if let Topology::Custom(graph) = &topology {
            if graph.size() != k {
                return Err(Error::GraphSizeMismatch {
                    graph: graph.size(),
                    k,
                });
            }
        }
        Ok(Self { n, m, k, topology })
    }

    /// Layout with `m` clusters of size `k`.
    pub fn with_clusters(m: usize, k: usize, topology: Topology) -> Result<Self> {
        let n = m.checked_mul(k).ok_or(Error::LayoutMismatch { n: usize::MAX, m, k })?;
        Self::new(n, m, k, topology)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn kind(&self) -> TopologyKind {
        self.topology.kind()
    }

    /// Cluster index of global node `node`.
    pub fn cluster_of(&self, node: usize) -> usize {
        node / self.k
    }

    /// Rejects rate/topology combinations the model treats as degenerate.
    pub fn check_rates(&self, rates: &RateConfig) -> Result<()> {
        match self.kind() {
            TopologyKind::Disconnected | TopologyKind::Custom => Ok(()),
            kind if rates.lambda() == 0.0 => Err(Error::DegenerateTopology { topology: kind }),
            _ => Ok(()),
        }
    }

    /// Per-cluster gossip graph under `rates`. Named topologies with `k = 1`
    /// have no edges.
    pub fn cluster_graph(&self, rates: &RateConfig) -> Result<ClusterGraph> {
        self.check_rates(rates)?;
        match &self.topology {
            Topology::Custom(graph) => Ok(graph.clone()),
            _ if self.k == 1 => build_topology(TopologyKind::Disconnected, 1, 0.0),
            other => build_topology(other.kind(), self.k, rates.lambda()),
        }
    }
}

/// How an [`AgeReport`] value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum AgeMethod {
    Exact,
    ClosedForm,
    Approximation,
    LowerBound,
    UpperBound,
    Simulated,
}

impl AgeMethod {
    pub fn name(self) -> &'static str {
        match self {
            AgeMethod::Exact => "exact",
            AgeMethod::ClosedForm => "closed_form",
            AgeMethod::Approximation => "approximation",
            AgeMethod::LowerBound => "lower_bound",
            AgeMethod::UpperBound => "upper_bound",
            AgeMethod::Simulated => "simulated",
        }
    }
}

impl fmt::Display for AgeMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Average version age at a cluster head and at a node.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct AgeReport {
    pub head_age: f64,
    pub node_age: f64,
    pub method: AgeMethod,
    /// 95% half-width, simulated reports only.
    pub ci_halfwidth: Option<f64>,
}

impl AgeReport {
    pub fn new(head_age: f64, node_age: f64, method: AgeMethod) -> Self {
        Self {
            head_age,
            node_age,
            method,
            ci_halfwidth: None,
        }
    }

    /// `node_age - head_age`: the part of the age accrued inside the cluster.
    pub fn cluster_share(&self) -> f64 {
        self.node_age - self.head_age
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disconnected_graph_is_all_zero() {
        let g = build_topology(TopologyKind::Disconnected, 6, 1.0).unwrap();
        assert_eq!(g.size(), 6);
        assert_eq!(g.nonzero_count(), 0);
        assert_eq!(g.total_rate(), 0.0);
    }

    #[test]
    fn bi_ring_splits_budget_between_two_neighbors() {
        let g = build_topology(TopologyKind::BiRing, 6, 1.0).unwrap();
        for i in 0..6 {
            assert_eq!(g.rate(i, (i + 1) % 6), 0.5);
            assert_eq!(g.rate(i, (i + 5) % 6), 0.5);
            assert_eq!(g.row_sum(i), 1.0);
        }
        assert_eq!(g.nonzero_count(), 12);
        assert!(g.is_symmetric());
    }

    #[test]
    fn bi_ring_of_two_merges_parallel_edges() {
        let g = build_topology(TopologyKind::BiRing, 2, 3.0).unwrap();
        assert_eq!(g.rate(0, 1), 3.0);
        assert_eq!(g.rate(1, 0), 3.0);
    }

    #[test]
    fn uni_ring_has_k_edges() {
        let g = build_topology(TopologyKind::UniRing, 7, 2.0).unwrap();
        assert_eq!(g.nonzero_count(), 7);
        for i in 0..7 {
            assert_eq!(g.rate(i, (i + 1) % 7), 2.0);
        }
        assert!(!g.is_symmetric());
    }

    #[test]
    fn fully_connected_rate_per_edge() {
        let g = build_topology(TopologyKind::FullyConnected, 4, 3.0).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(g.rate(i, j), if i == j { 0.0 } else { 1.0 });
            }
        }
    }

    #[test]
    fn single_node_with_gossip_is_rejected() {
        for kind in [TopologyKind::UniRing, TopologyKind::BiRing, TopologyKind::FullyConnected] {
            assert!(matches!(build_topology(kind, 1, 1.0), Err(Error::NoNeighbor { .. })));
        }
        assert!(build_topology(TopologyKind::Disconnected, 1, 1.0).is_ok());
    }

    #[test]
    fn zero_gossip_only_for_disconnected() {
        assert!(build_topology(TopologyKind::Disconnected, 4, 0.0).is_ok());
        assert_eq!(
            build_topology(TopologyKind::BiRing, 4, 0.0),
            Err(Error::DegenerateTopology { topology: TopologyKind::BiRing })
        );
    }

    #[test]
    fn negative_rates_rejected() {
        assert!(matches!(build_topology(TopologyKind::BiRing, 4, -1.0), Err(Error::InvalidRate { .. })));
        assert!(RateConfig::new(1.0, 1.0, 1.0, -0.5).is_err());
        assert!(RateConfig::new(0.0, 1.0, 1.0, 1.0).is_err());
        assert!(RateConfig::new(1.0, f64::NAN, 1.0, 1.0).is_err());
        assert!(RateConfig::new(1.0, 1.0, 1.0, 0.0).is_ok());
    }

    #[test]
    fn layout_requires_exact_divisibility() {
        assert!(ClusterLayout::new(120, 10, 12, Topology::Disconnected).is_ok());
        assert_eq!(
            ClusterLayout::new(120, 7, 17, Topology::Disconnected),
            Err(Error::LayoutMismatch { n: 120, m: 7, k: 17 })
        );
        assert!(ClusterLayout::new(0, 0, 0, Topology::Disconnected).is_err());
    }

    #[test]
    fn custom_graph_must_match_cluster_size() {
        let g = build_topology(TopologyKind::FullyConnected, 3, 1.0).unwrap();
        assert_eq!(
            ClusterLayout::new(8, 2, 4, Topology::Custom(g.clone())),
            Err(Error::GraphSizeMismatch { graph: 3, k: 4 })
        );
        assert!(ClusterLayout::new(6, 2, 3, Topology::Custom(g)).is_ok());
    }

    #[test]
    fn graph_validation() {
        assert!(ClusterGraph::from_rows(&[[1.0, 0.0], [0.0, 0.0]]).is_err());
        assert!(ClusterGraph::from_rows(&[[0.0, -1.0], [0.0, 0.0]]).is_err());
        assert!(ClusterGraph::from_rows(&[vec![0.0, 1.0], vec![0.0]]).is_err());
        assert!(ClusterGraph::from_rows(&[[0.0, 1.0], [2.0, 0.0]]).is_ok());
    }

    #[test]
    fn subset_accessors() {
        let g = build_topology(TopologyKind::BiRing, 6, 1.0).unwrap();
        // S = {1, 2}
        let s = 0b000110;
        assert_eq!(g.rate_into(0, s), 0.5);
        assert_eq!(g.rate_into(3, s), 0.5);
        assert_eq!(g.rate_into(4, s), 0.0);
        assert_eq!(g.rate_into(1, s), 0.0);
        assert_eq!(g.updating_neighbors(s), 0b001001);
    }

    #[test]
    fn ring_layout_with_zero_gossip_is_degenerate() {
        let rates = RateConfig::new(1.0, 1.0, 1.0, 0.0).unwrap();
        let ring = ClusterLayout::new(4, 1, 4, Topology::BiRing).unwrap();
        assert!(matches!(ring.cluster_graph(&rates), Err(Error::DegenerateTopology { .. })));
        let disc = ClusterLayout::new(4, 1, 4, Topology::Disconnected).unwrap();
        assert!(disc.cluster_graph(&rates).is_ok());
    }
}
