use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use qaoa_lab::pipeline::{
    cmd_benchmark, cmd_generate, cmd_median_table, cmd_report, ExperimentConfig, ReportOptions, METADATA_FILE,
};
use qaoa_lab::strategies::{MedianTableConfig, DEFAULT_TQA_DT};
use qaoa_lab::{AdamConfig, EvalConfig, InstanceClass, StrategyTag};
use std::path::PathBuf;
use std::process::ExitCode;

/// Environment variable that takes precedence over `--out`.
const OUT_ENV: &str = "QAOA_LAB_OUT";

#[derive(Parser)]
#[command(name = "qaoa-lab", version, about = "MaxCut QAOA initialisation benchmark")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate instances and a manifest.
    Generate(GenerateArgs),
    /// Optimise every instance under every strategy and write metadata.csv.
    Benchmark(BenchmarkArgs),
    /// Rebuild the per-class median parameter table.
    MedianTable(MedianArgs),
    /// Summarise metadata.csv: median kappa, best counts, instance space.
    Report(ReportArgs),
}

#[derive(Args)]
struct Common {
    /// Comma-separated instance classes (default: all seven).
    #[arg(long, value_delimiter = ',')]
    classes: Vec<InstanceClass>,
    #[arg(long, default_value_t = 10)]
    per_class: usize,
    #[arg(long, default_value_t = 8)]
    nodes: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "qaoa-lab-out")]
    out: PathBuf,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct BenchmarkArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 3)]
    layers: usize,
    /// Comma-separated strategies: random, tqa, qibpi, three_regular.
    #[arg(long, value_delimiter = ',')]
    strategies: Vec<StrategyTag>,
    /// Energy evaluations per run.
    #[arg(long, default_value_t = 20_000)]
    budget: u64,
    /// Trotter time step for TQA.
    #[arg(long, default_value_t = DEFAULT_TQA_DT)]
    dt: f64,
    #[arg(long, default_value_t = 0.95)]
    tau: f64,
    #[arg(long, default_value_t = 100_000)]
    penalty: u64,
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    /// Median table JSON for qibpi and three_regular (default: built-in table).
    #[arg(long)]
    table: Option<PathBuf>,
    /// Generate the instances first if no manifest exists.
    #[arg(long)]
    generate: bool,
}

#[derive(Args)]
struct MedianArgs {
    #[arg(long, value_delimiter = ',')]
    classes: Vec<InstanceClass>,
    /// Instances per class.
    #[arg(long, default_value_t = 100)]
    per_class: usize,
    #[arg(long, default_value_t = 8)]
    nodes: usize,
    /// Build entries for p = 1..=layers.
    #[arg(long, default_value_t = 10)]
    layers: usize,
    #[arg(long, default_value_t = 100_000)]
    budget: u64,
    /// Random starts per instance; the best optimum is kept.
    #[arg(long, default_value_t = 10)]
    restarts: usize,
    /// Take plain medians without reducing optima by the energy symmetries.
    #[arg(long)]
    no_canonicalize: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory; the table is written to <out>/median_table.json.
    #[arg(long, default_value = "qaoa-lab-out")]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long, default_value = "qaoa-lab-out")]
    out: PathBuf,
    /// Metadata CSV (default: <out>/metadata.csv).
    #[arg(long)]
    metadata: Option<PathBuf>,
    #[arg(long, default_value_t = 100_000)]
    penalty: u64,
    /// Also draw a p = 1 landscape for one instance of each class.
    #[arg(long)]
    landscapes: bool,
    #[arg(long, default_value_t = 41)]
    resolution: usize,
}

fn out_dir(flag: PathBuf) -> PathBuf {
    match std::env::var_os(OUT_ENV) {
        Some(v) if !v.is_empty() => PathBuf::from(v),
        _ => flag,
    }
}

fn classes(list: Vec<InstanceClass>) -> Vec<InstanceClass> {
    if list.is_empty() {
        InstanceClass::ALL.to_vec()
    } else {
        list
    }
}

fn experiment(common: Common) -> ExperimentConfig {
    ExperimentConfig {
        classes: classes(common.classes),
        per_class: common.per_class,
        n: common.nodes,
        base_seed: common.seed,
        out_dir: out_dir(common.out),
        workers: common.workers,
        ..Default::default()
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate(args) => {
            let cfg = experiment(args.common);
            let manifest = cmd_generate(&cfg)?;
            println!("generated {} instances in {}", manifest.len(), cfg.out_dir.display());
        }
        Command::Benchmark(args) => {
            let strategies = if args.strategies.is_empty() { StrategyTag::ALL.to_vec() } else { args.strategies };
            let cfg = ExperimentConfig {
                p: args.layers,
                strategies,
                adam: AdamConfig::default().with_budget(args.budget),
                eval: EvalConfig { tau: args.tau, penalty: args.penalty, epsilon: args.epsilon },
                dt: args.dt,
                table: args.table,
                ..experiment(args.common)
            };
            if args.generate && !cfg.out_dir.join(qaoa_lab::pipeline::MANIFEST_FILE).exists() {
                cmd_generate(&cfg)?;
            }
            let summary = cmd_benchmark(&cfg)?;
            println!(
                "{} instances: {} runs executed, {} reused; metadata in {}",
                summary.instances,
                summary.runs_executed,
                summary.runs_reused,
                cfg.out_dir.join(METADATA_FILE).display()
            );
        }
        Command::MedianTable(args) => {
            if args.layers == 0 {
                bail!("--layers must be at least 1");
            }
            let cfg = MedianTableConfig {
                classes: classes(args.classes),
                n: args.nodes,
                layers: (1..=args.layers).collect(),
                instances_per_class: args.per_class,
                adam: AdamConfig::default().with_budget(args.budget),
                base_seed: args.seed,
                restarts: args.restarts,
                canonicalize: !args.no_canonicalize,
            };
            let path = out_dir(args.out).join("median_table.json");
            let pool = qaoa_lab::pipeline::thread_pool(args.workers)?;
            let table = pool.install(|| cmd_median_table(&cfg, &path))?;
            println!("wrote {} entries to {}", table.len(), path.display());
        }
        Command::Report(args) => {
            let out = out_dir(args.out);
            let metadata = args.metadata.unwrap_or_else(|| out.join(METADATA_FILE));
            let opts = ReportOptions {
                penalty: args.penalty,
                landscapes: args.landscapes,
                landscape_resolution: args.resolution,
                ..Default::default()
            };
            let summary =
                cmd_report(&metadata, &out, &opts).with_context(|| format!("report on {}", metadata.display()))?;
            print!("{}", qaoa_lab::pipeline::render_summary(&summary));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
