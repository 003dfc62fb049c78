//! Discrete-event simulation of the full Poisson updating system.
//!
//! All processes are superposed: one exponential clock at the total rate,
//! then a category (exogenous, source→head, head→node, gossip) chosen in
//! proportion to its rate, then a uniform member inside the category.
//! Ages are integrated lazily: `∫Δ_i = ∫N_s − ∫N_i`, where `∫N_s` is kept
//! globally and `∫N_i` is settled only when `N_i` changes.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analytic::head_age;
use crate::error::{Error, Result};
use crate::model::{AgeMethod, AgeReport, ClusterGraph, ClusterLayout, RateConfig, Topology};
use crate::numeric::student_t_975;

pub const DEFAULT_WARMUP_FRACTION: f64 = 0.1;
pub const DEFAULT_HORIZON: f64 = 1e5;
pub const DEFAULT_REPLICATIONS: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub layout: ClusterLayout,
    pub rates: RateConfig,
    /// Simulated time per replication.
    pub horizon: f64,
    /// Discarded prefix of the horizon, in `[0, 1)`.
    pub warmup_fraction: f64,
    pub replications: usize,
    /// Replication `r` is seeded with `seed ^ r`.
    pub seed: u64,
}

impl SimConfig {
    pub fn new(layout: ClusterLayout, rates: RateConfig) -> Self {
        Self {
            layout,
            rates,
            horizon: DEFAULT_HORIZON,
            warmup_fraction: DEFAULT_WARMUP_FRACTION,
            replications: DEFAULT_REPLICATIONS,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(Error::InvalidSimConfig("horizon must be finite and positive"));
        }
        if self.replications == 0 {
            return Err(Error::InvalidSimConfig("replications must be at least 1"));
        }
        if self.warmup_fraction.is_nan() || self.warmup_fraction < 0.0 {
            return Err(Error::InvalidSimConfig("warmup fraction must be in [0, 1)"));
        }
        if self.warmup_fraction >= 1.0 || self.horizon * (1.0 - self.warmup_fraction) <= 0.0 {
            return Err(Error::WarmupTooShort {
                horizon: self.horizon,
                warmup_fraction: self.warmup_fraction,
            });
        }
        self.layout.check_rates(&self.rates)
    }

    pub fn replication_seed(&self, replication: usize) -> u64 {
        self.seed ^ replication as u64
    }
}

/// One transition of the system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Event {
    /// The source produces a new version.
    Exogenous,
    SourceToHead { head: usize },
    /// Head of `node`'s cluster pushes to `node`.
    HeadToNode { node: usize },
    /// Node `from` pushes its version to node `to` (same cluster).
    Gossip { from: usize, to: usize },
}

impl Event {
    pub fn category(&self) -> usize {
        match self {
            Event::Exogenous => 0,
            Event::SourceToHead { .. } => 1,
            Event::HeadToNode { .. } => 2,
            Event::Gossip { .. } => 3,
        }
    }
}

/// Event tallies by category.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EventCounts {
    pub exogenous: u64,
    pub source_to_head: u64,
    pub head_to_node: u64,
    pub gossip: u64,
}

impl EventCounts {
    fn record(&mut self, event: &Event) {
        match event {
            Event::Exogenous => self.exogenous += 1,
            Event::SourceToHead { .. } => self.source_to_head += 1,
            Event::HeadToNode { .. } => self.head_to_node += 1,
            Event::Gossip { .. } => self.gossip += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.exogenous + self.source_to_head + self.head_to_node + self.gossip
    }
}

/// Versions held by the source, heads and nodes, plus age integrals.
#[derive(Debug, Clone)]
pub struct SimState {
    k: usize,
    source_version: u64,
    head_version: Vec<u64>,
    node_version: Vec<u64>,
    clock: f64,
    /// Start of the current integration window.
    window_start: f64,
    /// `∫N_s dt` over the window.
    source_area: f64,
    /// `∫N_c dt` settled up to `head_mark[c]`.
    head_area: Vec<f64>,
    head_mark: Vec<f64>,
    node_area: Vec<f64>,
    node_mark: Vec<f64>,
}

impl SimState {
    /// Everyone starts at version 0, time 0.
    pub fn new(m: usize, k: usize) -> Self {
        let n = m * k;
        Self {
            k,
            source_version: 0,
            head_version: vec![0; m],
            node_version: vec![0; n],
            clock: 0.0,
            window_start: 0.0,
            source_area: 0.0,
            head_area: vec![0.0; m],
            head_mark: vec![0.0; m],
            node_area: vec![0.0; n],
            node_mark: vec![0.0; n],
        }
    }

    pub fn source_version(&self) -> u64 {
        self.source_version
    }

    pub fn head_version(&self) -> &[u64] {
        &self.head_version
    }

    pub fn node_version(&self) -> &[u64] {
        &self.node_version
    }

    pub fn clock(&self) -> f64 {
        self.clock
    }

    /// Current `Δ_i(t) = N_s(t) - N_i(t)`.
    pub fn node_age(&self, node: usize) -> u64 {
        self.source_version - self.node_version[node]
    }

    pub fn head_age(&self, head: usize) -> u64 {
        self.source_version - self.head_version[head]
    }

    /// Advances time by `dt` without any transition.
    pub fn advance(&mut self, dt: f64) {
        self.source_area += self.source_version as f64 * dt;
        self.clock += dt;
    }

    /// Applies `event` at the current clock.
    pub fn apply(&mut self, event: Event) {
        match event {
            Event::Exogenous => self.source_version += 1,
            Event::SourceToHead { head } => {
                self.settle_head(head);
                self.head_version[head] = self.source_version;
            }
            Event::HeadToNode { node } => {
                let head = node / self.k;
                let offered = self.head_version[head];
                if offered > self.node_version[node] {
                    self.settle_node(node);
                    self.node_version[node] = offered;
                }
                debug_assert!(self.node_version[node] <= self.head_version[head]);
            }
            Event::Gossip { from, to } => {
                debug_assert_eq!(from / self.k, to / self.k, "gossip crosses clusters");
                let offered = self.node_version[from];
                if offered > self.node_version[to] {
                    self.settle_node(to);
                    self.node_version[to] = offered;
                }
                debug_assert!(self.node_version[to] <= self.head_version[to / self.k]);
            }
        }
    }

    /// Advances by `dt`, then applies `event`.
    pub fn step(&mut self, dt: f64, event: Event) {
        self.advance(dt);
        self.apply(event);
    }

    fn settle_node(&mut self, node: usize) {
        self.node_area[node] += self.node_version[node] as f64 * (self.clock - self.node_mark[node]);
        self.node_mark[node] = self.clock;
    }

    fn settle_head(&mut self, head: usize) {
        self.head_area[head] += self.head_version[head] as f64 * (self.clock - self.head_mark[head]);
        self.head_mark[head] = self.clock;
    }

    /// Restarts all integrals at the current clock.
    pub fn reset_integrals(&mut self) {
        self.window_start = self.clock;
        self.source_area = 0.0;
        self.head_area.fill(0.0);
        self.head_mark.fill(self.clock);
        self.node_area.fill(0.0);
        self.node_mark.fill(self.clock);
    }

    /// `∫Δ_i dt` over the current window.
    pub fn node_age_integral(&self, node: usize) -> f64 {
        let held = self.node_area[node] + self.node_version[node] as f64 * (self.clock - self.node_mark[node]);
        self.source_area - held
    }

    pub fn head_age_integral(&self, head: usize) -> f64 {
        let held = self.head_area[head] + self.head_version[head] as f64 * (self.clock - self.head_mark[head]);
        self.source_area - held
    }

    pub fn window_length(&self) -> f64 {
        self.clock - self.window_start
    }

    /// `N_i ≤ N_c(i) ≤ N_s` for every node and head.
    pub fn check_dominance(&self) -> bool {
        self.head_version.iter().all(|&h| h <= self.source_version)
            && self
                .node_version
                .iter()
                .enumerate()
                .all(|(i, &v)| v <= self.head_version[i / self.k])
    }
}

#[derive(Debug, Clone)]
enum GossipPicker {
    Silent,
    UniRing,
    BiRing,
    Full,
    /// Cumulative edge weights of one cluster graph, row-major.
    Custom { cumulative: Vec<f64> },
}

/// Samples inter-event times and events from the superposed process.
#[derive(Debug, Clone)]
pub struct EventSampler {
    m: usize,
    k: usize,
    /// Category upper thresholds on `[0, total)`.
    thresholds: [f64; 4],
    picker: GossipPicker,
}

impl EventSampler {
    pub fn new(layout: &ClusterLayout, rates: &RateConfig) -> Self {
        let (m, k, n) = (layout.m(), layout.k(), layout.n());
        let gossip_allowed = k >= 2 && rates.lambda() > 0.0;
        let (picker, gossip_rate) = match layout.topology() {
            Topology::Disconnected => (GossipPicker::Silent, 0.0),
            Topology::Custom(graph) => custom_picker(graph, m),
            _ if !gossip_allowed => (GossipPicker::Silent, 0.0),
            Topology::UniRing => (GossipPicker::UniRing, n as f64 * rates.lambda()),
            Topology::BiRing => (GossipPicker::BiRing, n as f64 * rates.lambda()),
            Topology::FullyConnected => (GossipPicker::Full, n as f64 * rates.lambda()),
        };
        let mut thresholds = [0.0; 4];
        let mut acc = 0.0;
        for (slot, rate) in thresholds
            .iter_mut()
            .zip([rates.lambda_e(), rates.lambda_s(), m as f64 * rates.lambda_c(), gossip_rate])
        {
            acc += rate;
            *slot = acc;
        }
        Self {
            m,
            k,
            thresholds,
            picker,
        }
    }

    pub fn total_rate(&self) -> f64 {
        self.thresholds[3]
    }

    /// Rate of each category: exogenous, source→head, head→node, gossip.
    pub fn category_rates(&self) -> [f64; 4] {
        let t = self.thresholds;
        [t[0], t[1] - t[0], t[2] - t[1], t[3] - t[2]]
    }

    pub fn next_gap<R: Rng>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.gen();
        -libm::log1p(-u) / self.total_rate()
    }

    pub fn next_event<R: Rng>(&self, rng: &mut R) -> Event {
        let x = rng.gen::<f64>() * self.total_rate();
        let n = self.m * self.k;
        if x < self.thresholds[0] {
            Event::Exogenous
        } else if x < self.thresholds[1] {
            Event::SourceToHead {
                head: rng.gen_range(0..self.m),
            }
        } else if x < self.thresholds[2] || self.thresholds[3] == self.thresholds[2] {
            Event::HeadToNode {
                node: rng.gen_range(0..n),
            }
        } else {
            self.pick_gossip(rng)
        }
    }

    fn pick_gossip<R: Rng>(&self, rng: &mut R) -> Event {
        let k = self.k;
        match &self.picker {
            GossipPicker::Silent => unreachable!("gossip drawn with zero gossip rate"),
            GossipPicker::Custom { cumulative } => {
                let cluster = rng.gen_range(0..self.m);
                let target = rng.gen::<f64>() * cumulative[cumulative.len() - 1];
                let edge = cumulative.partition_point(|&c| c <= target).min(cumulative.len() - 1);
                Event::Gossip {
                    from: cluster * k + edge / k,
                    to: cluster * k + edge % k,
                }
            }
            named => {
                let from = rng.gen_range(0..self.m * k);
                let base = from - from % k;
                let local = from % k;
                let to_local = match named {
                    GossipPicker::UniRing => (local + 1) % k,
                    GossipPicker::BiRing => {
                        if rng.gen::<bool>() {
                            (local + 1) % k
                        } else {
                            (local + k - 1) % k
                        }
                    }
                    _ => {
                        let other = rng.gen_range(0..k - 1);
                        if other >= local {
                            other + 1
                        } else {
                            other
                        }
                    }
                };
                Event::Gossip {
                    from,
                    to: base + to_local,
                }
            }
        }
    }
}

fn custom_picker(graph: &ClusterGraph, m: usize) -> (GossipPicker, f64) {
    let per_cluster = graph.total_rate();
    if per_cluster == 0.0 {
        return (GossipPicker::Silent, 0.0);
    }
    let k = graph.size();
    let mut acc = 0.0;
    let cumulative = (0..k * k)
        .map(|e| {
            acc += graph.rate(e / k, e % k);
            acc
        })
        .collect();
    (GossipPicker::Custom { cumulative }, m as f64 * per_cluster)
}

/// Time-averaged ages of one replication.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationResult {
    pub replication: usize,
    pub seed: u64,
    pub node_ages: Vec<f64>,
    pub head_ages: Vec<f64>,
    pub events: EventCounts,
}

impl ReplicationResult {
    pub fn mean_node_age(&self) -> f64 {
        mean(&self.node_ages)
    }

    pub fn mean_head_age(&self) -> f64 {
        mean(&self.head_ages)
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Runs replication `replication` of `config`. Deterministic in
/// `(config, replication)`.
pub fn run_replication(config: &SimConfig, replication: usize) -> Result<ReplicationResult> {
    config.validate()?;
    let layout = &config.layout;
    let sampler = EventSampler::new(layout, &config.rates);
    let seed = config.replication_seed(replication);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = SimState::new(layout.m(), layout.k());
    let mut events = EventCounts::default();

    let warmup_end = config.horizon * config.warmup_fraction;
    let mut warmed = warmup_end == 0.0;
    loop {
        let gap = sampler.next_gap(&mut rng);
        let next = state.clock() + gap;
        if !warmed && next >= warmup_end {
            state.advance(warmup_end - state.clock());
            state.reset_integrals();
            warmed = true;
        }
        if next >= config.horizon {
            state.advance(config.horizon - state.clock());
            break;
        }
        let event = sampler.next_event(&mut rng);
        events.record(&event);
        state.advance(next - state.clock());
        state.apply(event);
    }
    debug_assert!(state.check_dominance());

    let window = state.window_length();
    Ok(ReplicationResult {
        replication,
        seed,
        node_ages: (0..layout.n()).map(|i| state.node_age_integral(i) / window).collect(),
        head_ages: (0..layout.m()).map(|c| state.head_age_integral(c) / window).collect(),
        events,
    })
}

/// Aggregate over replications.
#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    /// Mean node and head age with the node-age 95% half-width.
    pub summary: AgeReport,
    /// 95% half-width of the head-age estimate.
    pub head_ci_halfwidth: Option<f64>,
    /// Per-node ages averaged over replications.
    pub node_ages: Vec<f64>,
    pub head_ages: Vec<f64>,
    pub replications: Vec<ReplicationResult>,
}

impl SimReport {
    pub fn total_events(&self) -> EventCounts {
        self.replications.iter().fold(EventCounts::default(), |mut acc, r| {
            acc.exogenous += r.events.exogenous;
            acc.source_to_head += r.events.source_to_head;
            acc.head_to_node += r.events.head_to_node;
            acc.gossip += r.events.gossip;
            acc
        })
    }
}

/// Mean and 95% half-width (`None` for a single sample).
fn mean_and_ci(samples: impl Iterator<Item = f64> + Clone) -> (f64, Option<f64>) {
    let count = samples.clone().count();
    let avg = samples.clone().sum::<f64>() / count as f64;
    if count < 2 {
        return (avg, None);
    }
    let var = samples.map(|x| (x - avg) * (x - avg)).sum::<f64>() / (count - 1) as f64;
    (avg, Some(student_t_975(count - 1) * libm::sqrt(var / count as f64)))
}

/// Combines replications in the given order. The result only depends on the
/// order of `results`, not on how they were produced.
pub fn aggregate(results: Vec<ReplicationResult>) -> SimReport {
    assert!(!results.is_empty(), "aggregate needs at least one replication");
    let (node_age, node_ci) = mean_and_ci(results.iter().map(|r| r.mean_node_age()));
    let (head_age, head_ci) = mean_and_ci(results.iter().map(|r| r.mean_head_age()));
    let count = results.len() as f64;
    let per_slot = |pick: fn(&ReplicationResult) -> &Vec<f64>| -> Vec<f64> {
        let len = pick(&results[0]).len();
        (0..len)
            .map(|i| results.iter().map(|r| pick(r)[i]).sum::<f64>() / count)
            .collect()
    };
    let node_ages = per_slot(|r| &r.node_ages);
    let head_ages = per_slot(|r| &r.head_ages);
    SimReport {
        summary: AgeReport {
            head_age,
            node_age,
            method: AgeMethod::Simulated,
            ci_halfwidth: node_ci,
        },
        head_ci_halfwidth: head_ci,
        node_ages,
        head_ages,
        replications: results,
    }
}

/// Runs every replication serially and aggregates them.
pub fn run(config: &SimConfig) -> Result<SimReport> {
    config.validate()?;
    let results = (0..config.replications)
        .map(|r| run_replication(config, r))
        .collect::<Result<Vec<_>>>()?;
    Ok(aggregate(results))
}

/// Simulated time-averaged head age.
pub fn estimate_head_age(config: &SimConfig) -> Result<f64> {
    Ok(run(config)?.summary.head_age)
}

/// Analytic head age for the same config, `m·λe/λs`.
pub fn reference_head_age(config: &SimConfig) -> f64 {
    head_age(&config.rates, config.layout.m())
}
