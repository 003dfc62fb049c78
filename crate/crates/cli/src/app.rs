//! Argument parsing and dispatch.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use gossip_age::{RateConfig, TopologyKind};

use crate::commands;
use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};
use crate::output::{fmt_num, write_file, Command as CommandKind, OutputFormat, RunManifest};
use crate::presets::Panel;

#[derive(Debug, Parser)]
#[command(name = "gossip-age", version, about = "Version age of information in clustered gossip networks")]
pub struct Cli {
    /// Worker threads for simulation replications (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact node age plus the closed forms, approximations and bounds that apply.
    Analytic(ConfigArgs),
    /// Monte Carlo estimate of node and head ages.
    Simulate(SimulateArgs),
    /// Node age over every cluster size dividing n.
    Sweep(SweepArgs),
    /// Growth exponent of the node age along a topology's scaling schedule.
    Scaling(ScalingArgs),
    /// Optimal cluster sizes at n = 120 for the four preset rate panels.
    #[command(name = "reproduce-fig3")]
    ReproduceFig3(Fig3Args),
}

#[derive(Debug, Args)]
pub struct ConfigArgs {
    /// JSON experiment configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Output file; the extension (.csv or .json) selects the format.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: ConfigArgs,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub replications: Option<usize>,
    #[arg(long)]
    pub horizon: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: ConfigArgs,
    /// Sweep this topology instead of the configured one.
    #[arg(long, value_parser = parse_topology)]
    pub topology: Option<TopologyKind>,
}

#[derive(Debug, Args)]
pub struct ScalingArgs {
    #[arg(long, value_parser = parse_topology)]
    pub topology: TopologyKind,
    /// Rates are taken from this config; unit rates otherwise.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Comma-separated network sizes (default depends on topology).
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Fig3Args {
    /// Single panel to compute (default: all).
    #[arg(long, value_enum)]
    pub panel: Option<Panel>,
    /// Directory receiving one CSV per panel and topology plus summary.csv.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_topology(s: &str) -> std::result::Result<TopologyKind, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string()))
        .map_err(|_| format!("unknown topology `{s}` (disconnected, uniring, biring, full, custom)"))
}

fn manifest(command: CommandKind, config: Option<&Path>, out: Option<&Path>, seed: Option<u64>) -> RunManifest {
    RunManifest {
        command,
        config_path: config.map(Path::to_path_buf),
        output_path: out.map(Path::to_path_buf),
        seed,
    }
}

/// Writes `csv` or `json` bytes to the manifest's output file.
fn emit(
    manifest: &RunManifest,
    csv: impl FnOnce() -> Result<Vec<u8>>,
    json: impl FnOnce() -> Result<Vec<u8>>,
) -> Result<()> {
    if let (Some(path), Some(format)) = (&manifest.output_path, manifest.output_format()?) {
        let bytes = match format {
            OutputFormat::Csv => csv()?,
            OutputFormat::Json => json()?,
        };
        write_file(path, &bytes)?;
    }
    Ok(())
}

/// Executes a parsed command line, writing human-readable text to `stdout`.
pub fn run(cli: Cli, stdout: &mut dyn Write) -> Result<()> {
    let threads = cli.threads;
    let say = |out: &mut dyn Write, text: String| out.write_all(text.as_bytes()).map_err(|e| CliError::io("<stdout>", e));
    match cli.command {
        Command::Analytic(args) => {
            let m = manifest(CommandKind::Analytic, Some(&args.config), args.out.as_deref(), None);
            m.output_format()?;
            let cfg = ExperimentConfig::load(&args.config)?;
            let summary = commands::analytic(&cfg.layout()?, &cfg.rates()?)?;
            say(stdout, summary.to_text())?;
            emit(&m, || summary.to_csv(), || Ok(serde_json::to_vec_pretty(&summary)?))
        }
        Command::Simulate(args) => {
            let c = &args.common;
            let m = manifest(CommandKind::Simulate, Some(&c.config), c.out.as_deref(), args.seed);
            m.output_format()?;
            let cfg = ExperimentConfig::load(&c.config)?;
            let mut sim = cfg.sim_config()?;
            if let Some(seed) = args.seed {
                sim.seed = seed;
            }
            if let Some(r) = args.replications {
                sim.replications = r;
            }
            if let Some(h) = args.horizon {
                sim.horizon = h;
            }
            let result = commands::simulate(&sim, threads)?;
            say(stdout, result.reference_line() + "\n")?;
            emit(&m, || result.to_csv(), || result.to_json())
        }
        Command::Sweep(args) => {
            let c = &args.common;
            let m = manifest(CommandKind::Sweep, Some(&c.config), c.out.as_deref(), None);
            m.output_format()?;
            let cfg = ExperimentConfig::load(&c.config)?;
            let (n, _, _) = cfg.sizes()?;
            let kind = args.topology.unwrap_or(cfg.topology);
            let result = commands::sweep(n, &cfg.rates()?, kind)?;
            let mut text = String::new();
            for p in &result.points {
                text += &format!("m={:<6} k={:<6} node_age={}\n", p.m, p.k, fmt_num(p.node_age));
            }
            text += &format!(
                "argmin k={} node_age={}\n",
                commands::join_sizes(&result.argmin_set),
                fmt_num(result.min_age)
            );
            say(stdout, text)?;
            emit(
                &m,
                || commands::sweep_csv(std::slice::from_ref(&result)),
                || Ok(serde_json::to_vec_pretty(&result)?),
            )
        }
        Command::Scaling(args) => {
            let m = manifest(CommandKind::Scaling, args.config.as_deref(), args.out.as_deref(), None);
            m.output_format()?;
            let rates = match &args.config {
                Some(path) => ExperimentConfig::load(path)?.rates()?,
                None => RateConfig::unit(),
            };
            let sizes = args.sizes.unwrap_or_else(|| commands::default_scaling_sizes(args.topology));
            let result = commands::scaling(args.topology, &rates, &sizes)?;
            let mut text = String::new();
            for s in &result.samples {
                text += &format!("n={:<12} m={:<8} k={:<10} node_age={}\n", s.n, s.m, s.k, fmt_num(s.node_age));
            }
            text += &format!("exponent={} r_squared={}\n", fmt_num(result.exponent), fmt_num(result.r_squared));
            if let Some(log) = &result.log_model {
                text += &format!(
                    "log model: node_age = {}·ln n + {} (r_squared={})\n",
                    fmt_num(log.slope),
                    fmt_num(log.intercept),
                    fmt_num(log.r_squared)
                );
            }
            say(stdout, text)?;
            emit(&m, || result.to_csv(), || result.to_json())
        }
        Command::ReproduceFig3(args) => {
            let panels = match args.panel {
                Some(p) => vec![p],
                None => Panel::ALL.to_vec(),
            };
            if let Some(dir) = &args.out {
                std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
            }
            let results = commands::reproduce_fig3(&panels, args.out.as_deref())?;
            let mut text = String::new();
            for p in &results {
                let r = &p.rates;
                text += &format!(
                    "panel {} (lambda_e={} lambda_s={} lambda_c={} lambda={})\n",
                    p.label,
                    fmt_num(r.lambda_e()),
                    fmt_num(r.lambda_s()),
                    fmt_num(r.lambda_c()),
                    fmt_num(r.lambda())
                );
                for s in &p.sweeps {
                    text += &format!(
                        "  {:<13} argmin k={:<8} node_age={}\n",
                        s.topology.name(),
                        commands::join_sizes(&s.argmin_set),
                        fmt_num(s.min_age)
                    );
                }
            }
            say(stdout, text)
        }
    }
}
