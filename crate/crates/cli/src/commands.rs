//! Command implementations. Each returns its data and, where the CLI writes
//! files, the exact bytes written.

use std::path::Path;

use gossip_age::analytic::{
    fully_connected_age_approx, fully_connected_bounds, general_subset_age, layout_node_age, ring_node_age_approx,
    ring_node_age_closed_form,
};
use gossip_age::optimize::{
    fit_log_model, fit_scaling_exponent, scaling_samples, sweep_cluster_sizes, LogModelFit, ScalingSample,
    SweepResult,
};
use gossip_age::sim::{self, SimConfig, SimReport};
use gossip_age::{AgeMethod, AgeReport, ClusterLayout, RateConfig, Topology, TopologyKind};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{CliError, Result};
use crate::output::{csv_bytes, fmt_num, write_file};
use crate::presets::{Panel, PANEL_N, PANEL_TOPOLOGIES};

/// Runs `f` on a pool of `threads` workers, or on the global pool.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        Some(0) => Err(CliError::Usage("--threads must be at least 1".into())),
        Some(n) => Ok(rayon::ThreadPoolBuilder::new().num_threads(n).build()?.install(f)),
        None => Ok(f()),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalyticEntry {
    pub label: &'static str,
    pub method: AgeMethod,
    pub head_age: f64,
    pub node_age: f64,
    /// `node_age - exact`, absent for the exact row.
    pub gap: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalyticSummary {
    pub topology: TopologyKind,
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub entries: Vec<AnalyticEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_node: Option<Vec<f64>>,
    pub notes: Vec<String>,
}

impl AnalyticSummary {
    pub fn exact(&self) -> &AnalyticEntry {
        &self.entries[0]
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("topology={} n={} m={} k={}\n", self.topology, self.n, self.m, self.k);
        out += &format!("head_age                 {}\n", fmt_num(self.exact().head_age));
        for e in &self.entries {
            out += &format!("{:<24} {}", e.label, fmt_num(e.node_age));
            if let Some(gap) = e.gap {
                out += &format!("  (gap {})", fmt_num(gap));
            }
            out.push('\n');
        }
        if let Some(per_node) = &self.per_node {
            for (i, a) in per_node.iter().enumerate() {
                out += &format!("node[{i}]                  {}\n", fmt_num(*a));
            }
        }
        for note in &self.notes {
            out += &format!("note: {note}\n");
        }
        out
    }

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        csv_bytes(
            &["label", "method", "head_age", "node_age", "gap"],
            self.entries.iter().map(|e| {
                vec![
                    e.label.to_string(),
                    e.method.to_string(),
                    fmt_num(e.head_age),
                    fmt_num(e.node_age),
                    e.gap.map(fmt_num).unwrap_or_default(),
                ]
            }),
        )
    }
}

/// Exact age plus every approximation and bound defined for the layout.
pub fn analytic(layout: &ClusterLayout, rates: &RateConfig) -> Result<AnalyticSummary> {
    let (m, k) = (layout.m(), layout.k());
    let exact = layout_node_age(layout, rates)?;
    let mut entries = vec![entry("node_age exact", exact, None)];
    let mut notes = Vec::new();
    let mut per_node = None;
    let with_gap = |label, r: AgeReport| entry(label, r, Some(r.node_age - exact.node_age));

    match layout.topology() {
        Topology::UniRing | Topology::BiRing if k >= 2 => {
            entries.push(with_gap("node_age closed_form", ring_node_age_closed_form(rates, m, k)?));
            entries.push(with_gap("node_age approximation", ring_node_age_approx(rates, m, k)?));
        }
        Topology::FullyConnected if k >= 2 => {
            entries.push(with_gap("node_age approximation", fully_connected_age_approx(rates, m, k)?));
            match fully_connected_bounds(rates, m, k) {
                Ok(b) => {
                    entries.push(with_gap("node_age lower_bound", b.lower_report(exact.head_age)));
                    entries.push(with_gap("node_age upper_bound", b.upper_report(exact.head_age)));
                }
                Err(_) => notes.push("bounds need lambda_c == lambda; skipped".to_string()),
            }
        }
        Topology::Custom(graph) => {
            per_node = Some(general_subset_age(graph, rates, m)?);
            notes.push("custom graph: exact row is the mean over nodes".to_string());
        }
        _ => {}
    }
    Ok(AnalyticSummary {
        topology: layout.kind(),
        n: layout.n(),
        m,
        k,
        entries,
        per_node,
        notes,
    })
}

fn entry(label: &'static str, r: AgeReport, gap: Option<f64>) -> AnalyticEntry {
    AnalyticEntry {
        label,
        method: r.method,
        head_age: r.head_age,
        node_age: r.node_age,
        gap,
    }
}

#[derive(Debug, Clone)]
pub struct SimulationOutput {
    pub config: SimConfig,
    pub report: SimReport,
    /// Exact analytic ages for the same layout and rates.
    pub reference: AgeReport,
}

/// Runs all replications, in parallel, and aggregates them in replication
/// order so the result does not depend on scheduling.
pub fn simulate(config: &SimConfig, threads: Option<usize>) -> Result<SimulationOutput> {
    config.validate()?;
    let reference = layout_node_age(&config.layout, &config.rates)?;
    let results = with_threads(threads, || {
        (0..config.replications)
            .into_par_iter()
            .map(|r| sim::run_replication(config, r))
            .collect::<gossip_age::Result<Vec<_>>>()
    })??;
    Ok(SimulationOutput {
        config: config.clone(),
        report: sim::aggregate(results),
        reference,
    })
}

pub const SIMULATION_HEADER: [&str; 12] = [
    "topology",
    "n",
    "m",
    "k",
    "lambda_e",
    "lambda_s",
    "lambda_c",
    "lambda",
    "seed",
    "node_age",
    "head_age",
    "ci_halfwidth",
];

impl SimulationOutput {
    /// One row per replication (empty `ci_halfwidth`), then the aggregate
    /// row carrying the base seed and the 95% half-width.
    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let c = &self.config;
        let prefix = || {
            vec![
                c.layout.kind().to_string(),
                c.layout.n().to_string(),
                c.layout.m().to_string(),
                c.layout.k().to_string(),
                fmt_num(c.rates.lambda_e()),
                fmt_num(c.rates.lambda_s()),
                fmt_num(c.rates.lambda_c()),
                fmt_num(c.rates.lambda()),
            ]
        };
        let mut rows: Vec<Vec<String>> = self
            .report
            .replications
            .iter()
            .map(|r| {
                let mut row = prefix();
                row.extend([
                    r.seed.to_string(),
                    fmt_num(r.mean_node_age()),
                    fmt_num(r.mean_head_age()),
                    String::new(),
                ]);
                row
            })
            .collect();
        let s = &self.report.summary;
        let mut total = prefix();
        total.extend([
            c.seed.to_string(),
            fmt_num(s.node_age),
            fmt_num(s.head_age),
            s.ci_halfwidth.map(fmt_num).unwrap_or_default(),
        ]);
        rows.push(total);
        csv_bytes(&SIMULATION_HEADER, rows)
    }

    pub fn to_json(&self) -> Result<Vec<u8>> {
        #[derive(Serialize)]
        struct Replication {
            seed: u64,
            node_age: f64,
            head_age: f64,
        }
        #[derive(Serialize)]
        struct Doc<'a> {
            topology: TopologyKind,
            n: usize,
            m: usize,
            k: usize,
            rates: &'a RateConfig,
            horizon: f64,
            warmup_fraction: f64,
            seed: u64,
            simulated: &'a AgeReport,
            head_ci_halfwidth: Option<f64>,
            node_ages: &'a [f64],
            analytic: &'a AgeReport,
            replications: Vec<Replication>,
        }
        let c = &self.config;
        let doc = Doc {
            topology: c.layout.kind(),
            n: c.layout.n(),
            m: c.layout.m(),
            k: c.layout.k(),
            rates: &c.rates,
            horizon: c.horizon,
            warmup_fraction: c.warmup_fraction,
            seed: c.seed,
            simulated: &self.report.summary,
            head_ci_halfwidth: self.report.head_ci_halfwidth,
            node_ages: &self.report.node_ages,
            analytic: &self.reference,
            replications: self
                .report
                .replications
                .iter()
                .map(|r| Replication {
                    seed: r.seed,
                    node_age: r.mean_node_age(),
                    head_age: r.mean_head_age(),
                })
                .collect(),
        };
        Ok(serde_json::to_vec_pretty(&doc)?)
    }

    pub fn reference_line(&self) -> String {
        let s = &self.report.summary;
        format!(
            "simulated node_age {} ± {} (head {}), analytic node_age {} (head {})",
            fmt_num(s.node_age),
            s.ci_halfwidth.map(fmt_num).unwrap_or_else(|| "n/a".into()),
            fmt_num(s.head_age),
            fmt_num(self.reference.node_age),
            fmt_num(self.reference.head_age),
        )
    }
}

fn named(kind: TopologyKind) -> Result<TopologyKind> {
    if kind == TopologyKind::Custom {
        Err(CliError::Usage("sweeps and scaling need a named topology, not custom".into()))
    } else {
        Ok(kind)
    }
}

pub fn sweep(n: usize, rates: &RateConfig, kind: TopologyKind) -> Result<SweepResult> {
    Ok(sweep_cluster_sizes(n, rates, named(kind)?)?)
}

/// `topology,n,m,k,node_age` rows in increasing `k`, then a summary row
/// `topology,n,argmin,<k;k;...>,<min age>`.
pub fn sweep_csv(results: &[SweepResult]) -> Result<Vec<u8>> {
    let mut rows = Vec::new();
    for s in results {
        for p in &s.points {
            rows.push(vec![
                s.topology.to_string(),
                s.n.to_string(),
                p.m.to_string(),
                p.k.to_string(),
                fmt_num(p.node_age),
            ]);
        }
        rows.push(vec![
            s.topology.to_string(),
            s.n.to_string(),
            "argmin".to_string(),
            join_sizes(&s.argmin_set),
            fmt_num(s.min_age),
        ]);
    }
    csv_bytes(&["topology", "n", "m", "k", "node_age"], rows)
}

pub fn join_sizes(sizes: &[usize]) -> String {
    sizes.iter().map(usize::to_string).collect::<Vec<_>>().join(";")
}

/// Default network sizes for each scaling schedule.
pub fn default_scaling_sizes(kind: TopologyKind) -> Vec<usize> {
    let decades = match kind {
        TopologyKind::UniRing | TopologyKind::BiRing => 3..=9,
        TopologyKind::FullyConnected => 2..=7,
        _ => 2..=6,
    };
    decades.map(|e| 10usize.pow(e)).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalingOutput {
    pub topology: TopologyKind,
    pub exponent: f64,
    pub r_squared: f64,
    pub samples: Vec<ScalingSample>,
    /// `age ≈ slope·ln n + intercept`, fully connected only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub log_model: Option<LogModelFit>,
}

pub fn scaling(kind: TopologyKind, rates: &RateConfig, sizes: &[usize]) -> Result<ScalingOutput> {
    let kind = named(kind)?;
    let samples = scaling_samples(kind, rates, sizes)?;
    let points: Vec<(f64, f64)> = samples.iter().map(|s| (s.n as f64, s.node_age)).collect();
    let fit = fit_scaling_exponent(&points)?;
    let log_model = if kind == TopologyKind::FullyConnected {
        Some(fit_log_model(&points)?)
    } else {
        None
    };
    Ok(ScalingOutput {
        topology: kind,
        exponent: fit.exponent,
        r_squared: fit.r_squared,
        samples,
        log_model,
    })
}

impl ScalingOutput {
    pub fn to_json(&self) -> Result<Vec<u8>> {
        Ok(serde_json::to_vec_pretty(self)?)
    }

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut rows: Vec<Vec<String>> = self
            .samples
            .iter()
            .map(|s| {
                vec![
                    self.topology.to_string(),
                    s.n.to_string(),
                    s.m.to_string(),
                    s.k.to_string(),
                    fmt_num(s.node_age),
                ]
            })
            .collect();
        rows.push(vec![
            self.topology.to_string(),
            "exponent".into(),
            fmt_num(self.exponent),
            "r_squared".into(),
            fmt_num(self.r_squared),
        ]);
        csv_bytes(&["topology", "n", "m", "k", "node_age"], rows)
    }
}

#[derive(Debug, Clone)]
pub struct PanelSweep {
    pub panel: Panel,
    pub label: &'static str,
    pub rates: RateConfig,
    pub sweeps: Vec<SweepResult>,
}

impl PanelSweep {
    pub fn argmin(&self, kind: TopologyKind) -> &[usize] {
        &self
            .sweeps
            .iter()
            .find(|s| s.topology == kind)
            .expect("panel covers every topology")
            .argmin_set
    }
}

/// Sweeps all panel topologies at `n = 120` for each rate set of `panels`,
/// optionally writing `fig3<label>_<topology>.csv` files plus
/// `summary.csv` into `out_dir`.
pub fn reproduce_fig3(panels: &[Panel], out_dir: Option<&Path>) -> Result<Vec<PanelSweep>> {
    let mut all = Vec::new();
    for &panel in panels {
        for set in panel.rate_sets() {
            let sweeps = PANEL_TOPOLOGIES
                .iter()
                .map(|&kind| sweep(PANEL_N, &set.rates, kind))
                .collect::<Result<Vec<_>>>()?;
            all.push(PanelSweep {
                panel,
                label: set.label,
                rates: set.rates,
                sweeps,
            });
        }
    }
    if let Some(dir) = out_dir {
        for p in &all {
            for s in &p.sweeps {
                let path = dir.join(format!("fig3{}_{}.csv", p.label, s.topology));
                write_file(&path, &sweep_csv(std::slice::from_ref(s))?)?;
            }
        }
        write_file(&dir.join("summary.csv"), &fig3_summary_csv(&all)?)?;
    }
    Ok(all)
}

pub fn fig3_summary_csv(panels: &[PanelSweep]) -> Result<Vec<u8>> {
    let rows = panels.iter().flat_map(|p| {
        p.sweeps.iter().map(move |s| {
            vec![
                p.panel.letter().to_string(),
                p.label.to_string(),
                fmt_num(p.rates.lambda_e()),
                fmt_num(p.rates.lambda_s()),
                fmt_num(p.rates.lambda_c()),
                fmt_num(p.rates.lambda()),
                s.topology.to_string(),
                join_sizes(&s.argmin_set),
                fmt_num(s.min_age),
            ]
        })
    });
    csv_bytes(
        &["panel", "rate_set", "lambda_e", "lambda_s", "lambda_c", "lambda", "topology", "argmin", "min_age"],
        rows,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disconnected_analytic_summary() {
        let layout = ClusterLayout::new(4, 2, 2, Topology::Disconnected).unwrap();
        let s = analytic(&layout, &RateConfig::unit()).unwrap();
        assert_eq!(s.exact().node_age, 4.0);
        assert_eq!(s.entries.len(), 1);
        assert!(s.to_text().contains("node_age exact           4\n"));
    }

    #[test]
    fn fully_connected_summary_has_bounds() {
        let layout = ClusterLayout::new(12, 2, 6, Topology::FullyConnected).unwrap();
        let s = analytic(&layout, &RateConfig::unit()).unwrap();
        let labels: Vec<_> = s.entries.iter().map(|e| e.label).collect();
        assert!(labels.contains(&"node_age lower_bound"));
        let lower = s.entries.iter().find(|e| e.label == "node_age lower_bound").unwrap();
        assert!(lower.gap.unwrap() <= 0.0);

        let skewed = RateConfig::new(1.0, 1.0, 2.0, 1.0).unwrap();
        let s = analytic(&layout, &skewed).unwrap();
        assert_eq!(s.notes.len(), 1);
    }

    #[test]
    fn single_node_full_cluster_is_boundary() {
        let layout = ClusterLayout::new(3, 3, 1, Topology::FullyConnected).unwrap();
        let r = RateConfig::new(1.0, 2.0, 4.0, 1.0).unwrap();
        let s = analytic(&layout, &r).unwrap();
        assert_eq!(s.exact().node_age, 3.0 / 2.0 + 0.25);
    }

    #[test]
    fn sweep_csv_layout() {
        let s = sweep(6, &RateConfig::unit(), TopologyKind::Disconnected).unwrap();
        let text = String::from_utf8(sweep_csv(&[s]).unwrap()).unwrap();
        assert_eq!(
            text,
            "topology,n,m,k,node_age\n\
             disconnected,6,6,1,7\n\
             disconnected,6,3,2,5\n\
             disconnected,6,2,3,5\n\
             disconnected,6,1,6,7\n\
             disconnected,6,argmin,2;3,5\n"
        );
    }

    #[test]
    fn custom_sweep_is_usage_error() {
        let err = sweep(6, &RateConfig::unit(), TopologyKind::Custom).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn zero_threads_rejected() {
        assert!(with_threads(Some(0), || ()).is_err());
        assert_eq!(with_threads(Some(2), || 5).unwrap(), 5);
    }
}
