//! `replicator`: run the dynamics, compare runs with bounds, check
//! equilibria, build the mixture heatmap, and report map fixed points.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use replicator_core::io::{bounds_command, emit_trajectory, heatmap_command, map_report, timestamp};
use replicator_core::{
    is_psne, is_two_spike_smsne, parse_config, run_experiment, BoundKind, ConfigOverrides, Error,
    HeatmapSpec, IteratedMap, Profile, Result, TieBreakRule,
};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "replicator", version, about = "Replicator dynamics for candidate positioning in plurality elections")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate and write ecdf.csv, hist.csv, probes.csv, summary.json, manifest.json.
    Run(RunArgs),
    /// Compare a finished run against a closed-form bound; writes bounds.csv.
    Bounds(BoundsArgs),
    /// Check a pure profile or a two-spike mixed strategy for equilibrium.
    NashCheck(NashArgs),
    /// Mode of the final distribution over mixtures of 3, 4 and 5 candidates.
    Heatmap(HeatmapArgs),
    /// Fixed points and stability of one of the iterated maps.
    Maps(MapsArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML config file; flags below override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    generations: Option<usize>,
    #[arg(long)]
    elections: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Mirror copied positions across 1/2 with probability 1/2.
    #[arg(long)]
    symmetry: bool,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    perturbation_variance: Option<f64>,
    #[arg(long)]
    memory: Option<usize>,
    #[arg(long)]
    top_h: Option<usize>,
    #[arg(long, value_enum)]
    rule: Option<Rule>,
    /// Extra point for the exact ECDF (repeatable).
    #[arg(long = "probe")]
    probes: Vec<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Rule {
    LeftRight,
    EqualSplit,
}

impl From<Rule> for TieBreakRule {
    fn from(r: Rule) -> Self {
        match r {
            Rule::LeftRight => TieBreakRule::LeftRight,
            Rule::EqualSplit => TieBreakRule::EqualSplit,
        }
    }
}

#[derive(Args)]
struct BoundsArgs {
    /// Directory written by `replicator run`.
    #[arg(long)]
    run: PathBuf,
    /// k2-exact, k3-upper, k4-upper, k2-noisy-limit, k3-noisy-limit or k4-noisy-limit.
    #[arg(long)]
    kind: String,
    /// Evaluation point (repeatable). Must be on the 1/512 grid or a probe of the run.
    #[arg(long = "x", required = true)]
    xs: Vec<f64>,
    /// Output directory; defaults to the run directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct NashArgs {
    /// Comma-separated candidate positions.
    #[arg(long, value_delimiter = ',', conflicts_with = "two_spike")]
    profile: Vec<f64>,
    #[arg(long, value_enum, default_value = "left-right")]
    rule: Rule,
    #[arg(long, default_value_t = replicator_core::equilibria::DEFAULT_GRID)]
    grid: usize,
    #[arg(long, default_value_t = replicator_core::equilibria::DEFAULT_OFFSET)]
    delta: f64,
    /// Check the 50/50 mixture over {x, 1-x} instead of a pure profile.
    #[arg(long, requires = "k")]
    two_spike: Option<f64>,
    #[arg(long)]
    k: Option<usize>,
}

#[derive(Args)]
struct HeatmapArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 10)]
    resolution: usize,
    #[arg(long, default_value_t = 100)]
    generations: usize,
    #[arg(long, default_value_t = 100_000)]
    elections: usize,
    #[arg(long, default_value_t = 1)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Turn off mirroring of copied positions.
    #[arg(long)]
    no_symmetry: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum MapKind {
    QuadraticNoisyK2,
    CubicNoisyK3,
    LinearNoisyK4,
    LargeK,
    CenterMassThreshold,
    TwoSpikeThreshold,
}

#[derive(Args)]
struct MapsArgs {
    #[arg(long, value_enum)]
    map: MapKind,
    #[arg(long)]
    k: Option<u32>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    x: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    /// Also iterate from this starting value.
    #[arg(long)]
    p0: Option<f64>,
    #[arg(long, default_value_t = 500)]
    steps: usize,
}

fn need<T>(v: Option<T>, name: &'static str) -> Result<T> {
    v.ok_or_else(|| Error::Config(format!("--{name} is required for this map")))
}

fn print_json<T: Serialize>(v: &T) -> Result<()> {
    let s = serde_json::to_string_pretty(v).map_err(|e| Error::Config(e.to_string()))?;
    println!("{s}");
    Ok(())
}

fn run(args: RunArgs) -> Result<()> {
    let overrides = ConfigOverrides {
        k: args.k,
        generations: args.generations,
        elections: args.elections,
        trials: args.trials,
        seed: args.seed,
        symmetry: args.symmetry.then_some(true),
        epsilon: args.epsilon,
        perturbation_variance: args.perturbation_variance,
        memory: args.memory,
        top_h: args.top_h,
        rule: args.rule.map(Into::into),
        probes: (!args.probes.is_empty()).then_some(args.probes),
    };
    let cfg = parse_config(args.config.as_deref(), &overrides)?;
    let started = timestamp();
    let runs = run_experiment(&cfg)?;
    let manifest = emit_trajectory(&runs, &args.out, Some(started))?;
    eprintln!("wrote {} files to {}", manifest.files.len() + 1, args.out.display());
    Ok(())
}

fn bounds(args: BoundsArgs) -> Result<()> {
    let kind: BoundKind = args.kind.parse()?;
    let out = args.out.unwrap_or_else(|| args.run.clone());
    let rows = bounds_command(&args.run, kind, &args.xs, &out)?;
    let failed = rows.iter().filter(|r| !r.satisfied).count();
    eprintln!("{} rows, {failed} outside the 4-SE slack", rows.len());
    Ok(())
}

fn nash(args: NashArgs) -> Result<()> {
    if let Some(x) = args.two_spike {
        let k = need(args.k, "k")?;
        return print_json(&is_two_spike_smsne(x, k)?);
    }
    let profile = Profile::new(args.profile, args.rule.into())?;
    print_json(&is_psne(&profile, args.grid, args.delta)?)
}

fn heatmap(args: HeatmapArgs) -> Result<()> {
    let spec = HeatmapSpec {
        resolution: args.resolution,
        generations: args.generations,
        elections: args.elections,
        trials: args.trials,
        seed: args.seed,
        symmetry: !args.no_symmetry,
    };
    let rows = heatmap_command(&spec, &args.out)?;
    eprintln!("{} cells written to {}", rows.len(), args.out.display());
    Ok(())
}

fn maps(args: MapsArgs) -> Result<()> {
    let map = match args.map {
        MapKind::QuadraticNoisyK2 => IteratedMap::QuadraticNoisyK2 {
            epsilon: need(args.epsilon, "epsilon")?,
            x: need(args.x, "x")?,
        },
        MapKind::CubicNoisyK3 => IteratedMap::CubicNoisyK3 {
            epsilon: need(args.epsilon, "epsilon")?,
        },
        MapKind::LinearNoisyK4 => IteratedMap::LinearNoisyK4 {
            epsilon: need(args.epsilon, "epsilon")?,
            x: need(args.x, "x")?,
            beta: need(args.beta, "beta")?,
        },
        MapKind::LargeK => IteratedMap::LargeK { k: need(args.k, "k")? },
        MapKind::CenterMassThreshold => IteratedMap::CenterMassThreshold { k: need(args.k, "k")? },
        MapKind::TwoSpikeThreshold => IteratedMap::TwoSpikeThreshold { k: need(args.k, "k")? },
    };
    print_json(&map_report(map, args.p0.map(|p| (p, args.steps)))?)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => run(a),
        Command::Bounds(a) => bounds(a),
        Command::NashCheck(a) => nash(a),
        Command::Heatmap(a) => heatmap(a),
        Command::Maps(a) => maps(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
