//! Simulator against the exact analytic ages.

use gossip_age::analytic::layout_node_age;
use gossip_age::model::build_topology;
use gossip_age::sim::{self, SimConfig};
use gossip_age::{ClusterGraph, ClusterLayout, RateConfig, Topology};

fn config(m: usize, k: usize, topology: Topology, rates: RateConfig, seed: u64) -> SimConfig {
    let mut c = SimConfig::new(ClusterLayout::with_clusters(m, k, topology).unwrap(), rates);
    c.horizon = 20_000.0;
    c.replications = 8;
    c.seed = seed;
    c
}

fn assert_agrees(c: &SimConfig) {
    let exact = layout_node_age(&c.layout, &c.rates).unwrap();
    let rep = sim::run(c).unwrap();
    let ci = rep.summary.ci_halfwidth.unwrap();
    let tol = (0.03 * exact.node_age).max(2.0 * ci);
    assert!(
        (rep.summary.node_age - exact.node_age).abs() <= tol,
        "{:?} m={} k={}: simulated {} ± {ci}, exact {}",
        c.layout.kind(),
        c.layout.m(),
        c.layout.k(),
        rep.summary.node_age,
        exact.node_age
    );
    let head_tol = (0.03 * exact.head_age).max(2.0 * rep.head_ci_halfwidth.unwrap());
    assert!((rep.summary.head_age - exact.head_age).abs() <= head_tol);
}

#[test]
fn small_grid_matches_exact_ages() {
    let rates = [RateConfig::unit(), RateConfig::new(1.0, 3.0, 2.0, 0.5).unwrap()];
    let mut seed = 11;
    for topology in [Topology::Disconnected, Topology::UniRing, Topology::BiRing, Topology::FullyConnected] {
        for (m, k) in [(1, 4), (2, 3), (3, 6)] {
            for r in rates {
                seed += 1;
                assert_agrees(&config(m, k, topology.clone(), r, seed));
            }
        }
    }
}

#[test]
fn custom_graph_per_node_ages() {
    // directed line 0 -> 1 -> 2 -> 3 with a chord back from 3 to 0
    let g = ClusterGraph::from_rows(&[
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [0.5, 0.0, 0.0, 0.0],
    ])
    .unwrap();
    let c = config(2, 4, Topology::Custom(g.clone()), RateConfig::unit(), 5);
    let exact = gossip_age::analytic::general_subset_age(&g, &c.rates, 2).unwrap();
    let rep = sim::run(&c).unwrap();
    for (node, simulated) in rep.node_ages.iter().enumerate() {
        let target = exact[node % 4];
        assert!((simulated - target).abs() <= 0.03 * target, "node {node}: {simulated} vs {target}");
    }
}

#[test]
fn head_age_estimates() {
    for (m, ls) in [(1usize, 1.0), (5, 1.0), (4, 2.5)] {
        let r = RateConfig::new(1.0, ls, 1.0, 1.0).unwrap();
        let c = config(m, 2, Topology::BiRing, r, 77);
        let est = sim::estimate_head_age(&c).unwrap();
        let target = sim::reference_head_age(&c);
        assert!((est - target).abs() <= 0.02 * target, "m={m}: {est} vs {target}");
    }
}

#[test]
fn event_counts_match_rates() {
    let r = RateConfig::new(1.0, 2.0, 1.5, 3.0).unwrap();
    let c = config(3, 4, Topology::BiRing, r, 9);
    let rep = sim::run(&c).unwrap();
    let counts = rep.total_events();
    let span = c.horizon * c.replications as f64;
    let expected = [1.0 * span, 2.0 * span, 3.0 * 1.5 * span, 12.0 * 3.0 * span];
    let observed = [counts.exogenous, counts.source_to_head, counts.head_to_node, counts.gossip];
    for (o, e) in observed.iter().zip(expected) {
        assert!((*o as f64 - e).abs() <= 3.0 * e.sqrt(), "{o} vs {e}");
    }
}

#[test]
fn disconnected_two_by_two_long_horizon() {
    let mut c = config(2, 2, Topology::Disconnected, RateConfig::unit(), 2024);
    c.horizon = 1e6;
    c.replications = 4;
    let rep = sim::run(&c).unwrap();
    let tol = (0.03 * 4.0f64).max(2.0 * rep.summary.ci_halfwidth.unwrap());
    assert!((rep.summary.node_age - 4.0).abs() <= tol);
}

#[test]
fn graph_helper_round_trip() {
    // generated named graphs behave the same as custom copies of them
    let g = build_topology(gossip_age::TopologyKind::FullyConnected, 4, 1.0).unwrap();
    let a = sim::run(&config(1, 4, Topology::FullyConnected, RateConfig::unit(), 3)).unwrap();
    let b = sim::run(&config(1, 4, Topology::Custom(g), RateConfig::unit(), 3)).unwrap();
    assert!((a.summary.node_age - b.summary.node_age).abs() <= 0.03 * a.summary.node_age);
}
