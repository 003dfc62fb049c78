//! Subset recursion over an arbitrary cluster graph.
//!
//! Subsets are bitmasks over the `k` cluster nodes. `Δ_S` only references
//! strict supersets `S ∪ {i}`, whose masks are numerically larger, so a
//! single pass from the full mask downwards fills the table.

use alloc::vec;
use alloc::vec::Vec;

use super::head_age;
use crate::error::{Error, Result};
use crate::model::{ClusterGraph, RateConfig};

/// Largest cluster the subset recursion accepts (`2^20` table entries).
pub const MAX_SUBSET_NODES: usize = 20;

/// `Δ_S` for every nonempty subset `S` of one cluster.
#[derive(Debug, Clone)]
pub struct SubsetAgeTable {
    k: usize,
    head_age: f64,
    ages: Vec<f64>,
}

impl SubsetAgeTable {
    pub fn solve(graph: &ClusterGraph, rates: &RateConfig, m: usize) -> Result<Self> {
        let k = graph.size();
        if k > MAX_SUBSET_NODES {
            return Err(Error::SubsetTooLarge {
                k,
                max: MAX_SUBSET_NODES,
            });
        }
        if m == 0 {
            return Err(Error::ZeroSize { what: "m" });
        }
        let dc = head_age(rates, m);
        let le = rates.lambda_e();
        let head_per_node = rates.lambda_c() / k as f64;
        let full: u64 = (1 << k) - 1;

        let mut ages = vec![f64::NAN; 1 << k];
        for set in (1..=full).rev() {
            let from_head = set.count_ones() as f64 * head_per_node;
            let mut numerator = le + from_head * dc;
            let mut denominator = from_head;
            let mut outside = full & !set;
            while outside != 0 {
                let i = outside.trailing_zeros() as usize;
                outside &= outside - 1;
                let rate = graph.rate_into(i, set);
                if rate > 0.0 {
                    numerator += rate * ages[(set | (1 << i)) as usize];
                    denominator += rate;
                }
            }
            ages[set as usize] = numerator / denominator;
        }
        Ok(Self { k, head_age: dc, ages })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn head_age(&self) -> f64 {
        self.head_age
    }

    /// `Δ_S` for a nonempty bitmask `set`.
    pub fn age(&self, set: u64) -> f64 {
        assert!(set != 0 && set < (1 << self.k), "subset mask out of range");
        self.ages[set as usize]
    }

    /// `Δ_{{i}}` for each node `i`.
    pub fn node_ages(&self) -> Vec<f64> {
        (0..self.k).map(|i| self.age(1 << i)).collect()
    }

    /// Largest violation of `Δ_{S∪{i}} ≤ Δ_S` over the table (0 if none).
    pub fn max_monotonicity_violation(&self) -> f64 {
        let full: u64 = (1 << self.k) - 1;
        let mut worst: f64 = 0.0;
        for set in 1..=full {
            for i in 0..self.k {
                let bigger = set | (1 << i);
                if bigger != set {
                    worst = worst.max(self.age(bigger) - self.age(set));
                }
            }
        }
        worst
    }
}

/// Per-node ages `Δ_{{i}}` of one cluster with gossip graph `graph`.
pub fn general_subset_age(graph: &ClusterGraph, rates: &RateConfig, m: usize) -> Result<Vec<f64>> {
    Ok(SubsetAgeTable::solve(graph, rates, m)?.node_ages())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{fully_connected_node_age_exact, ring_node_age_exact};
    use crate::model::{build_topology, TopologyKind};

    #[test]
    fn disconnected_cluster_matches_two_hop_formula() {
        let g = build_topology(TopologyKind::Disconnected, 3, 1.0).unwrap();
        let ages = general_subset_age(&g, &RateConfig::unit(), 1).unwrap();
        assert_eq!(ages.len(), 3);
        for a in ages {
            assert!((a - 4.0).abs() < 1e-12);
        }
    }

    #[test]
    fn full_set_only_updated_by_head() {
        let g = build_topology(TopologyKind::FullyConnected, 5, 3.0).unwrap();
        let r = RateConfig::new(1.0, 2.0, 0.5, 3.0).unwrap();
        let table = SubsetAgeTable::solve(&g, &r, 4).unwrap();
        assert!((table.age(0b11111) - (2.0 + 2.0)).abs() < 1e-12);
    }

    #[test]
    fn complete_graph_matches_chain() {
        let g = build_topology(TopologyKind::FullyConnected, 4, 1.0).unwrap();
        let ages = general_subset_age(&g, &RateConfig::unit(), 1).unwrap();
        let chain = fully_connected_node_age_exact(&RateConfig::unit(), 1, 4).unwrap().node_age();
        for a in ages {
            assert!((a - chain).abs() <= 1e-9 * chain);
        }
    }

    #[test]
    fn rings_of_both_directions_agree() {
        let r = RateConfig::unit();
        let uni = general_subset_age(&build_topology(TopologyKind::UniRing, 6, 1.0).unwrap(), &r, 1).unwrap();
        let bi = general_subset_age(&build_topology(TopologyKind::BiRing, 6, 1.0).unwrap(), &r, 1).unwrap();
        let chain = ring_node_age_exact(&r, 1, 6).unwrap().node_age();
        for (u, b) in uni.iter().zip(&bi) {
            assert!((u - b).abs() <= 1e-12 * b);
            assert!((u - chain).abs() <= 1e-9 * chain);
        }
    }

    #[test]
    fn table_is_monotone() {
        let g = build_topology(TopologyKind::BiRing, 8, 2.0).unwrap();
        let table = SubsetAgeTable::solve(&g, &RateConfig::new(1.0, 0.5, 3.0, 2.0).unwrap(), 2).unwrap();
        assert!(table.max_monotonicity_violation() <= 1e-12);
    }

    #[test]
    fn asymmetric_graph_gives_distinct_ages() {
        // a line 0 -> 1 -> 2: node 0 never hears gossip
        let g = ClusterGraph::from_rows(&[[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.0, 0.0, 0.0]]).unwrap();
        let ages = general_subset_age(&g, &RateConfig::unit(), 1).unwrap();
        assert!((ages[0] - 4.0).abs() < 1e-12);
        assert!(ages[1] < ages[0]);
        assert!(ages[2] < ages[1]);
    }

    #[test]
    fn oversized_cluster_rejected() {
        let g = build_topology(TopologyKind::Disconnected, 21, 0.0).unwrap();
        assert_eq!(
            general_subset_age(&g, &RateConfig::unit(), 1),
            Err(Error::SubsetTooLarge { k: 21, max: 20 })
        );
    }
}
